#pragma once

// Closed-form average age of information (AAoI) for single-source
// status-update queues with Poisson(lambda) arrivals and exp(mu) service.

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoi {

/// Arrival and service rates of a single-source queue.
class RateParams {
public:
  RateParams(double lambda, double mu) : lambda_(lambda), mu_(mu) {
    if (!std::isfinite(lambda) || !(lambda > 0.0))
      throw std::invalid_argument("arrival rate lambda must be finite and > 0");
    if (!std::isfinite(mu) || !(mu > 0.0))
      throw std::invalid_argument("service rate mu must be finite and > 0");
  }

  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }
  double rho() const noexcept { return lambda_ / mu_; }

private:
  double lambda_;
  double mu_;
};

enum class ClosedForm {
  MM12_PS,
  MM12_FGFS,
  MM12S_PS,
  MM12S_FGFS,
  MM12SS_PS,
  MM12SS_FGFS,
  MM11,
  MM11S,
  MM1_FGFS,
  MM1_PS_LOWER_BOUND,
};

inline constexpr std::array<ClosedForm, 10> kAllClosedForms = {
    ClosedForm::MM12_PS,   ClosedForm::MM12_FGFS,   ClosedForm::MM12S_PS, ClosedForm::MM12S_FGFS,
    ClosedForm::MM12SS_PS, ClosedForm::MM12SS_FGFS, ClosedForm::MM11,     ClosedForm::MM11S,
    ClosedForm::MM1_FGFS,  ClosedForm::MM1_PS_LOWER_BOUND,
};

/// The eight finite-buffer models that have an SHS table.
inline constexpr std::array<ClosedForm, 8> kFiniteModels = {
    ClosedForm::MM12_PS,   ClosedForm::MM12_FGFS,   ClosedForm::MM12S_PS, ClosedForm::MM12S_FGFS,
    ClosedForm::MM12SS_PS, ClosedForm::MM12SS_FGFS, ClosedForm::MM11,     ClosedForm::MM11S,
};

inline bool is_finite_buffer(ClosedForm id) noexcept {
  return id != ClosedForm::MM1_FGFS && id != ClosedForm::MM1_PS_LOWER_BOUND;
}

inline std::string_view to_string(ClosedForm id) noexcept {
  switch (id) {
  case ClosedForm::MM12_PS: return "mm12-ps";
  case ClosedForm::MM12_FGFS: return "mm12-fgfs";
  case ClosedForm::MM12S_PS: return "mm12star-ps";
  case ClosedForm::MM12S_FGFS: return "mm12star-fgfs";
  case ClosedForm::MM12SS_PS: return "mm12star2-ps";
  case ClosedForm::MM12SS_FGFS: return "mm12star2-fgfs";
  case ClosedForm::MM11: return "mm11";
  case ClosedForm::MM11S: return "mm11star";
  case ClosedForm::MM1_FGFS: return "mm1-fgfs";
  case ClosedForm::MM1_PS_LOWER_BOUND: return "mm1-ps-lb";
  }
  return "?";
}

/// One-line provenance for help output.
inline std::string_view describe(ClosedForm id) noexcept {
  switch (id) {
  case ClosedForm::MM12_PS: return "M/M/1/2 processor sharing, arrivals dropped when full";
  case ClosedForm::MM12_FGFS: return "M/M/1/2 first-generated-first-served, arrivals dropped when full";
  case ClosedForm::MM12S_PS: return "M/M/1/2* processor sharing, arrival replaces the newest packet";
  case ClosedForm::MM12S_FGFS: return "M/M/1/2* FGFS, arrival replaces the waiting packet";
  case ClosedForm::MM12SS_PS: return "M/M/1/2** processor sharing, arrival replaces the oldest packet";
  case ClosedForm::MM12SS_FGFS: return "M/M/1/2** FGFS, arrival replaces the packet in service";
  case ClosedForm::MM11: return "M/M/1/1, arrivals dropped while busy";
  case ClosedForm::MM11S: return "M/M/1/1*, arrival preempts the packet in service";
  case ClosedForm::MM1_FGFS: return "M/M/1 FGFS (requires rho < 1)";
  case ClosedForm::MM1_PS_LOWER_BOUND: return "lower bound (mu-lambda)/(lambda mu) on M/M/1-PS (requires rho < 1)";
  }
  return "";
}

inline ClosedForm parse_closed_form(std::string_view name) {
  for (ClosedForm id : kAllClosedForms)
    if (to_string(id) == name) return id;
  // Accept the short ASCII spellings too.
  if (name == "mm12s-ps") return ClosedForm::MM12S_PS;
  if (name == "mm12s-fgfs") return ClosedForm::MM12S_FGFS;
  if (name == "mm12ss-ps") return ClosedForm::MM12SS_PS;
  if (name == "mm12ss-fgfs") return ClosedForm::MM12SS_FGFS;
  if (name == "mm11s") return ClosedForm::MM11S;
  std::string msg = "unknown model '" + std::string(name) + "'; valid:";
  for (ClosedForm id : kAllClosedForms) msg += " " + std::string(to_string(id));
  throw std::invalid_argument(msg);
}

/// Homogeneous bivariate polynomial sum_k c[k] * lambda^k * mu^(d-k).
/// Evaluated by Horner in lambda with mu-power coefficients.
class HomogeneousPoly {
public:
  HomogeneousPoly() = default;
  HomogeneousPoly(std::initializer_list<double> coeffs) : c_(coeffs) {}
  explicit HomogeneousPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  std::size_t degree() const noexcept { return c_.empty() ? 0 : c_.size() - 1; }
  std::span<const double> coefficients() const noexcept { return c_; }

  double operator()(double lambda, double mu) const noexcept {
    if (c_.empty()) return 0.0;
    double acc = c_.back();
    double mu_pow = 1.0;
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      mu_pow *= mu;
      acc = acc * lambda + c_[k] * mu_pow;
    }
    return acc;
  }

  friend HomogeneousPoly operator*(const HomogeneousPoly& a, const HomogeneousPoly& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return HomogeneousPoly(std::move(out));
  }

  /// Coefficient of the lowest power of lambda that is nonzero.
  double lowest_nonzero() const {
    for (double v : c_)
      if (v != 0.0) return v;
    throw std::domain_error("zero polynomial");
  }
  /// Coefficient of the highest power of lambda that is nonzero.
  double highest_nonzero() const {
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
      if (*it != 0.0) return *it;
    throw std::domain_error("zero polynomial");
  }
  std::size_t lowest_power() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (c_[k] != 0.0) return k;
    throw std::domain_error("zero polynomial");
  }
  std::size_t highest_power() const {
    for (std::size_t k = c_.size(); k-- > 0;)
      if (c_[k] != 0.0) return k;
    throw std::domain_error("zero polynomial");
  }

private:
  std::vector<double> c_;
};

/// AAoI of a finite-buffer model as numerator / denominator, both homogeneous
/// in (lambda, mu) with deg(denominator) = deg(numerator) + 1.
struct RationalForm {
  HomogeneousPoly numerator;
  HomogeneousPoly denominator;

  double operator()(double lambda, double mu) const noexcept {
    return numerator(lambda, mu) / denominator(lambda, mu);
  }
};

namespace detail {

inline const HomogeneousPoly& lam() {
  static const HomogeneousPoly p{0.0, 1.0};
  return p;
}
inline const HomogeneousPoly& mu() {
  static const HomogeneousPoly p{1.0, 0.0};
  return p;
}
inline const HomogeneousPoly& lam_plus_mu() {
  static const HomogeneousPoly p{1.0, 1.0};
  return p;
}
inline const HomogeneousPoly& quad() { // lambda^2 + lambda mu + mu^2
  static const HomogeneousPoly p{1.0, 1.0, 1.0};
  return p;
}

inline HomogeneousPoly pow(const HomogeneousPoly& p, int n) {
  HomogeneousPoly out{1.0};
  for (int i = 0; i < n; ++i) out = out * p;
  return out;
}

} // namespace detail

/// Rational form of a finite-buffer closed form. Coefficients are listed from
/// mu^d (lambda^0) upward.
inline RationalForm rational_form(ClosedForm id) {
  using namespace detail;
  const HomogeneousPoly two{2.0};
  const HomogeneousPoly lm = lam() * mu();
  switch (id) {
  case ClosedForm::MM12_PS:
    return {{2, 6, 8, 9, 5}, two * lm * lam_plus_mu() * quad()};
  case ClosedForm::MM12_FGFS:
    return {{1, 3, 4, 5, 3}, lm * lam_plus_mu() * quad()};
  case ClosedForm::MM12S_PS:
    return {{2, 8, 14, 15, 11, 3}, two * lm * pow(lam_plus_mu(), 2) * quad()};
  case ClosedForm::MM12S_FGFS:
    return {{1, 4, 7, 8, 7, 2}, lm * pow(lam_plus_mu(), 2) * quad()};
  case ClosedForm::MM12SS_PS:
    return {{2, 10, 22, 29, 25, 11, 2}, two * lm * pow(lam_plus_mu(), 3) * quad()};
  case ClosedForm::MM12SS_FGFS:
    return {{1, 5, 11, 15, 14, 6, 1}, lm * pow(lam_plus_mu(), 3) * quad()};
  case ClosedForm::MM11:
    return {{1, 2, 2}, lm * lam_plus_mu()};
  case ClosedForm::MM11S:
    return {{1, 1}, lm};
  case ClosedForm::MM1_FGFS:
  case ClosedForm::MM1_PS_LOWER_BOUND:
    break;
  }
  throw std::invalid_argument("model '" + std::string(to_string(id)) +
                              "' has no rational closed form (infinite buffer)");
}

inline constexpr double kStabilityMargin = 1e-12;

inline void check_admissible(ClosedForm id, const RateParams& p) {
  if (!is_finite_buffer(id) && !(p.rho() < 1.0 - kStabilityMargin))
    throw std::domain_error("model '" + std::string(to_string(id)) +
                            "' requires rho = lambda/mu < 1 (got rho = " + std::to_string(p.rho()) + ")");
}

/// Average age of information for `id` at rates `p` (time units).
inline double aaoi(ClosedForm id, const RateParams& p) {
  check_admissible(id, p);
  const double lambda = p.lambda();
  const double mu = p.mu();
  switch (id) {
  case ClosedForm::MM1_FGFS: {
    const double rho = p.rho();
    return (1.0 + 1.0 / rho + rho * rho / (1.0 - rho)) / mu;
  }
  case ClosedForm::MM1_PS_LOWER_BOUND:
    return (mu - lambda) / (lambda * mu);
  default:
    return rational_form(id)(lambda, mu);
  }
}

/// aaoi(num, p) / aaoi(den, p); depends on rho only.
inline double ratio(ClosedForm num, ClosedForm den, const RateParams& p) {
  return aaoi(num, p) / aaoi(den, p);
}

enum class LoadLimit { Zero, Infinity };

/// Exact limit of aaoi(num)/aaoi(den) as rho -> 0 or rho -> infinity, from the
/// extreme coefficients of num_N * den_D over num_D * den_N.
inline double ratio_limit(ClosedForm num, ClosedForm den, LoadLimit limit) {
  const RationalForm a = rational_form(num);
  const RationalForm b = rational_form(den);
  const HomogeneousPoly top = a.numerator * b.denominator;
  const HomogeneousPoly bottom = a.denominator * b.numerator;
  if (limit == LoadLimit::Zero) {
    if (top.lowest_power() != bottom.lowest_power())
      return top.lowest_power() < bottom.lowest_power() ? std::numeric_limits<double>::infinity() : 0.0;
    return top.lowest_nonzero() / bottom.lowest_nonzero();
  }
  if (top.highest_power() != bottom.highest_power())
    return top.highest_power() > bottom.highest_power() ? std::numeric_limits<double>::infinity() : 0.0;
  return top.highest_nonzero() / bottom.highest_nonzero();
}

/// Bounds on C(rho) in the conjectured M/M/1-PS form
/// mu * Delta = 1/rho + 1 + C(rho).
struct ConjectureBounds {
  double lower = 0.0;          ///< general lower bound, always 0
  double upper = 0.0;          ///< rho^2 / (1 - rho)
  double large_rho_lower = 0.0;///< (rho - 0.5)^3 / (1 - rho)
  double large_rho_upper = 0.0;///< 0.75 rho / sqrt(1 - rho)
  bool large_rho_applicable = false;
};

inline ConjectureBounds conjecture_bounds(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("conjecture bounds need 0 < rho < 1");
  ConjectureBounds b;
  b.upper = rho * rho / (1.0 - rho);
  const double d = rho - 0.5;
  b.large_rho_lower = d * d * d / (1.0 - rho);
  b.large_rho_upper = 0.75 * rho / std::sqrt(1.0 - rho);
  // "Large enough" is left open; the pair is used only where it is consistent.
  b.large_rho_applicable = b.large_rho_lower <= b.large_rho_upper;
  return b;
}

} // namespace aoi
