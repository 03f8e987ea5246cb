#include <cmath>

#include "hardynorm/kernels.hpp"

namespace hardynorm::kernels::detail::scalar {

GapResult max_majorant_gap(const MajorantArgs& a, double lo, double hi,
                           std::size_t n) {
  const double y_pow = std::pow(std::abs(a.y), a.p - 2.0) * a.y;
  const double u_shift = a.gamma * a.y;
  const double ly = a.lambda * a.y;
  GapResult best{-HUGE_VAL, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_point(lo, hi, n, i);
    const double v = std::pow(std::abs(x - ly), a.p) -
                     a.c_pow_p * std::pow(std::abs(x), a.p);
    const double u = a.slope * y_pow * (x - u_shift);
    const double gap = v - u;
    if (gap > best.max_gap) best = {gap, i};
  }
  return best;
}

void abs_pow(const double* v, std::size_t n, double p, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(std::abs(v[i]), p);
}

double weighted_power_sum(const double* w, const double* v, std::size_t n,
                          double p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += w[i] * std::pow(std::abs(v[i]), p);
  return sum;
}

double weighted_modulus_power_sum(const double* w, const double* re,
                                  const double* im, std::size_t n, double p) {
  const double half_p = 0.5 * p;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += w[i] * std::pow(re[i] * re[i] + im[i] * im[i], half_p);
  }
  return sum;
}

}  // namespace hardynorm::kernels::detail::scalar
