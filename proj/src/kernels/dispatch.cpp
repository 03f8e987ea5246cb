#include <stdexcept>
#include <string>

#include "hardynorm/kernels.hpp"

namespace hardynorm::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(HARDYNORM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      static const bool supported =
          __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
      return supported;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() {
  static const Isa isa = isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  return isa;
}

double grid_point(double lo, double hi, std::size_t n, std::size_t i) {
  const double step = (hi - lo) / static_cast<double>(n - 1);
  return lo + static_cast<double>(i) * step;
}

namespace {

void require(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel variant '" + std::string(to_string(isa)) +
                                "' is not available on this machine");
  }
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel inputs differ in length");
}

}  // namespace

GapResult max_majorant_gap(const MajorantArgs& args, double lo, double hi,
                           std::size_t n, Isa isa) {
  if (n < 2 || !(lo < hi)) {
    throw std::invalid_argument("majorant grid needs lo < hi and n >= 2");
  }
  require(isa);
#if defined(HARDYNORM_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2::max_majorant_gap(args, lo, hi, n);
#endif
  return detail::scalar::max_majorant_gap(args, lo, hi, n);
}

void abs_pow(std::span<const double> v, double p, std::span<double> out,
             Isa isa) {
  require_same_size(v.size(), out.size());
  require(isa);
#if defined(HARDYNORM_HAVE_AVX2)
  if (isa == Isa::avx2) {
    detail::avx2::abs_pow(v.data(), v.size(), p, out.data());
    return;
  }
#endif
  detail::scalar::abs_pow(v.data(), v.size(), p, out.data());
}

double weighted_power_sum(std::span<const double> w, std::span<const double> v,
                          double p, Isa isa) {
  require_same_size(w.size(), v.size());
  require(isa);
#if defined(HARDYNORM_HAVE_AVX2)
  if (isa == Isa::avx2) {
    return detail::avx2::weighted_power_sum(w.data(), v.data(), v.size(), p);
  }
#endif
  return detail::scalar::weighted_power_sum(w.data(), v.data(), v.size(), p);
}

double weighted_modulus_power_sum(std::span<const double> w,
                                  std::span<const double> re,
                                  std::span<const double> im, double p,
                                  Isa isa) {
  require_same_size(w.size(), re.size());
  require_same_size(w.size(), im.size());
  require(isa);
#if defined(HARDYNORM_HAVE_AVX2)
  if (isa == Isa::avx2) {
    return detail::avx2::weighted_modulus_power_sum(w.data(), re.data(),
                                                    im.data(), w.size(), p);
  }
#endif
  return detail::scalar::weighted_modulus_power_sum(w.data(), re.data(),
                                                    im.data(), w.size(), p);
}

}  // namespace hardynorm::kernels
