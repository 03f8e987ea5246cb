#pragma once

// Data-parallel inner loops: grid sweeps of V - U for the majorization
// checks and |v|^p reductions for grid L^p norms. Every kernel has a scalar
// reference and an AVX2 variant; callers pick one explicitly or take
// best_isa(), which is probed once at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace hardynorm::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// True if the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Fastest available variant.
Isa best_isa();

/// V(x, y) - U(x, y) with V = |x - lambda y|^p - c_pow_p |x|^p and
/// U = slope |y|^(p-2) y (x - gamma y), for a fixed y.
struct MajorantArgs {
  double p;
  double lambda;
  double c_pow_p;
  double slope;
  double gamma;
  double y;
};

struct GapResult {
  double max_gap;
  /// First grid index attaining max_gap.
  std::size_t index;
};

/// x_i = lo + i (hi - lo)/(n - 1), i < n. n >= 2.
double grid_point(double lo, double hi, std::size_t n, std::size_t i);

/// max_i [V(x_i, y) - U(x_i, y)] over the equispaced grid.
GapResult max_majorant_gap(const MajorantArgs& args, double lo, double hi,
                           std::size_t n, Isa isa = best_isa());

/// out_i = |v_i|^p.
void abs_pow(std::span<const double> v, double p, std::span<double> out,
             Isa isa = best_isa());

/// sum_i w_i |v_i|^p.
double weighted_power_sum(std::span<const double> w, std::span<const double> v,
                          double p, Isa isa = best_isa());

/// sum_i w_i (re_i^2 + im_i^2)^(p/2).
double weighted_modulus_power_sum(std::span<const double> w,
                                  std::span<const double> re,
                                  std::span<const double> im, double p,
                                  Isa isa = best_isa());

namespace detail {

namespace scalar {
GapResult max_majorant_gap(const MajorantArgs& args, double lo, double hi,
                           std::size_t n);
void abs_pow(const double* v, std::size_t n, double p, double* out);
double weighted_power_sum(const double* w, const double* v, std::size_t n,
                          double p);
double weighted_modulus_power_sum(const double* w, const double* re,
                                  const double* im, std::size_t n, double p);
}  // namespace scalar

namespace avx2 {
GapResult max_majorant_gap(const MajorantArgs& args, double lo, double hi,
                           std::size_t n);
void abs_pow(const double* v, std::size_t n, double p, double* out);
double weighted_power_sum(const double* w, const double* v, std::size_t n,
                          double p);
double weighted_modulus_power_sum(const double* w, const double* re,
                                  const double* im, std::size_t n, double p);
}  // namespace avx2

}  // namespace detail

}  // namespace hardynorm::kernels
