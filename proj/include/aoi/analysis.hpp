#pragma once

// Load sweeps of the ratio bounds, extremal loads, M/M/1-PS evidence and the
// two-source comparisons.

#include "aoi/closed_form.hpp"
#include "aoi/shs.hpp"
#include "aoi/shs_models.hpp"
#include "aoi/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace aoi::analysis {

enum class Proposition {
  P2,
  P4,
  P5,
  P8,
  P9_STAR,
  COR1,
  P10_MM11_VS_STAR,
  P10_MM11_VS_STAR2, ///< mm11 / mm12star2-ps <= 2
  P11_MM11_VS_MM12PS,
  P12_MM11STAR,
  LEMMA1,
  CONJ1,
};

inline constexpr std::array<Proposition, 12> kAllPropositions = {
    Proposition::P2,
    Proposition::P4,
    Proposition::P5,
    Proposition::P8,
    Proposition::P9_STAR,
    Proposition::COR1,
    Proposition::P10_MM11_VS_STAR,
    Proposition::P10_MM11_VS_STAR2,
    Proposition::P11_MM11_VS_MM12PS,
    Proposition::P12_MM11STAR,
    Proposition::LEMMA1,
    Proposition::CONJ1,
};

/// Tolerance for bound constants given exactly (1.2, 4/3, ...).
inline constexpr double kExactBoundTol = 1e-9;
/// Tolerance for constants given to four decimals (1.0731, 0.9641, 1.0788).
inline constexpr double kRoundedBoundTol = 5e-5;

/// A claim lower <= aaoi(numerator) / aaoi(denominator) <= upper for all loads.
struct RatioClaim {
  ClosedForm numerator;
  ClosedForm denominator;
  double lower;
  double upper;
  double lower_tol;
  double upper_tol;
  double limit_at_zero;     ///< stated value as rho -> 0
  double limit_at_infinity; ///< stated value as rho -> infinity
  enum class Extremum { None, Maximum, Minimum } extremum = Extremum::None;
};

inline std::string_view to_string(Proposition p) noexcept {
  switch (p) {
  case Proposition::P2: return "p2";
  case Proposition::P4: return "p4";
  case Proposition::P5: return "p5";
  case Proposition::P8: return "p8";
  case Proposition::P9_STAR: return "p9";
  case Proposition::COR1: return "cor1";
  case Proposition::P10_MM11_VS_STAR: return "p10";
  case Proposition::P10_MM11_VS_STAR2: return "p10-remark";
  case Proposition::P11_MM11_VS_MM12PS: return "p11";
  case Proposition::P12_MM11STAR: return "p12";
  case Proposition::LEMMA1: return "lemma1";
  case Proposition::CONJ1: return "conj1";
  }
  return "?";
}

inline std::string_view describe(Proposition p) noexcept {
  switch (p) {
  case Proposition::P2: return "1 <= mm12-fgfs / mm12-ps <= 1.2";
  case Proposition::P4: return "1 <= mm12star-fgfs / mm12star-ps <= 4/3";
  case Proposition::P5: return "1 <= mm12-ps / mm12star-ps <= 5/3";
  case Proposition::P8: return "1 <= mm12star2-fgfs / mm12star2-ps <= 1.0731 (max at rho 2.3943)";
  case Proposition::P9_STAR: return "1 <= mm12star-ps / mm12star2-ps <= 3/2";
  case Proposition::COR1: return "1 <= mm12-ps / mm12star2-ps <= 5/2";
  case Proposition::P10_MM11_VS_STAR: return "1 <= mm11 / mm12star-ps <= 4/3";
  case Proposition::P10_MM11_VS_STAR2: return "1 <= mm11 / mm12star2-ps <= 2";
  case Proposition::P11_MM11_VS_MM12PS: return "0.9641 <= mm12-ps / mm11 <= 5/4 (min at rho 0.4697)";
  case Proposition::P12_MM11STAR: return "1 <= mm12star2-ps / mm11star <= 1.0788 (max at rho 2.3943)";
  case Proposition::LEMMA1: return "M/M/1-PS AAoI > (mu - lambda)/(lambda mu), via truncated SHS";
  case Proposition::CONJ1: return "0 <= C(rho) <= rho^2/(1-rho) for M/M/1-PS, via truncated SHS";
  }
  return "";
}

inline Proposition parse_proposition(std::string_view name) {
  for (Proposition p : kAllPropositions)
    if (to_string(p) == name) return p;
  std::string msg = "unknown proposition '" + std::string(name) + "'; valid:";
  for (Proposition p : kAllPropositions) msg += " " + std::string(to_string(p));
  throw std::invalid_argument(msg);
}

inline bool is_ratio_claim(Proposition p) noexcept { return p != Proposition::LEMMA1 && p != Proposition::CONJ1; }

inline RatioClaim ratio_claim(Proposition p) {
  using CF = ClosedForm;
  using E = RatioClaim::Extremum;
  constexpr double X = kExactBoundTol, R = kRoundedBoundTol;
  switch (p) {
  case Proposition::P2: return {CF::MM12_FGFS, CF::MM12_PS, 1.0, 1.2, X, X, 1.0, 1.2};
  case Proposition::P4: return {CF::MM12S_FGFS, CF::MM12S_PS, 1.0, 4.0 / 3.0, X, X, 1.0, 4.0 / 3.0};
  case Proposition::P5: return {CF::MM12_PS, CF::MM12S_PS, 1.0, 5.0 / 3.0, X, X, 1.0, 5.0 / 3.0};
  case Proposition::P8: return {CF::MM12SS_FGFS, CF::MM12SS_PS, 1.0, 1.0731, X, R, 1.0, 1.0, E::Maximum};
  case Proposition::P9_STAR: return {CF::MM12S_PS, CF::MM12SS_PS, 1.0, 1.5, X, X, 1.0, 1.5};
  case Proposition::COR1: return {CF::MM12_PS, CF::MM12SS_PS, 1.0, 2.5, X, X, 1.0, 2.5};
  case Proposition::P10_MM11_VS_STAR: return {CF::MM11, CF::MM12S_PS, 1.0, 4.0 / 3.0, X, X, 1.0, 4.0 / 3.0};
  case Proposition::P10_MM11_VS_STAR2: return {CF::MM11, CF::MM12SS_PS, 1.0, 2.0, X, X, 1.0, 2.0};
  case Proposition::P11_MM11_VS_MM12PS: return {CF::MM12_PS, CF::MM11, 0.9641, 1.25, R, X, 1.0, 1.25, E::Minimum};
  case Proposition::P12_MM11STAR: return {CF::MM12SS_PS, CF::MM11S, 1.0, 1.0788, X, R, 1.0, 1.0, E::Maximum};
  default: break;
  }
  throw std::invalid_argument("'" + std::string(to_string(p)) + "' is not a ratio bound");
}

/// The ratio of a claim at load rho (mu = 1).
inline double claim_ratio(const RatioClaim& c, double rho) { return ratio(c.numerator, c.denominator, RateParams(rho, 1.0)); }

/// n points log-spaced in [lo, hi] inclusive.
inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) throw std::invalid_argument("logspace: need 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// n points linearly spaced in [lo, hi] inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) throw std::invalid_argument("linspace: n must be >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = hi;
  return g;
}

/// Default sweep grid: 200 log-spaced loads in [1e-3, 1e3].
inline std::vector<double> default_grid() { return logspace(1e-3, 1e3, 200); }

struct BoundRow {
  double rho = 0.0;
  double value = 0.0; ///< ratio, or C(rho) for the conjecture, or Delta/bound for the lemma
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
};

struct BoundReport {
  Proposition proposition = Proposition::P2;
  std::string grid;
  std::vector<BoundRow> rows;
  double min_value = 0.0;
  double max_value = 0.0;
  double rho_at_min = 0.0;
  double rho_at_max = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Largest amount by which the literal bound is exceeded (0 if none).
  double literal_excess = 0.0;
  std::optional<double> rho_star; ///< extremal load, for claims with an interior extremum
  bool pass = false;
};

struct ExtremumResult {
  double rho_star = 0.0;        ///< golden-section optimum
  double ratio = 0.0;           ///< ratio at rho_star
  double polynomial_root = 0.0; ///< sign change of the reference stationarity polynomial
  bool is_maximum = true;
  bool agrees = false; ///< |rho_star - polynomial_root| <= 1e-4
};

/// Reference stationarity polynomials, coefficients from rho^0 upward.
inline std::vector<double> stationarity_polynomial(Proposition p) {
  switch (p) {
  case Proposition::P8:
  case Proposition::P12_MM11STAR:
    // -2r^10 - 12r^9 - 14r^8 + 36r^7 + 128r^6 + 172r^5 + 122r^4 + 44r^3 + 6r^2
    return {0, 0, 6, 44, 122, 172, 128, 36, -14, -12, -2};
  case Proposition::P11_MM11_VS_MM12PS:
    // 4r^6 + 36r^5 + 44r^4 + 20r^3 - 6r^2 - 8r
    return {0, -8, -6, 20, 44, 36, 4};
  default: break;
  }
  throw std::invalid_argument("'" + std::string(to_string(p)) + "' has no interior extremum");
}

inline double eval_poly(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

/// Stationary point of a claim's ratio: grid bracketing, golden-section
/// refinement in log(rho), and a bisection root of the reference polynomial.
inline ExtremumResult find_ratio_extremum(Proposition p, double lo = 1e-4, double hi = 1e4) {
  const RatioClaim c = ratio_claim(p);
  if (c.extremum == RatioClaim::Extremum::None)
    throw std::invalid_argument("'" + std::string(to_string(p)) + "' has no interior extremum");
  const bool maximize = c.extremum == RatioClaim::Extremum::Maximum;
  const double sign = maximize ? -1.0 : 1.0; // minimize sign * ratio
  auto f = [&](double log_rho) { return sign * claim_ratio(c, std::exp(log_rho)); };

  const auto grid = logspace(lo, hi, 801);
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(std::log(grid[i]));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0 || best + 1 == grid.size())
    throw std::runtime_error("no interior extremum of '" + std::string(to_string(p)) + "' in the search bracket");

  double a = std::log(grid[best - 1]), b = std::log(grid[best + 1]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (std::exp(b) - std::exp(a) > 1e-9) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    if (b - a < 1e-15) break;
  }
  ExtremumResult r;
  r.is_maximum = maximize;
  r.rho_star = std::exp(0.5 * (a + b));
  r.ratio = claim_ratio(c, r.rho_star);

  const auto poly = stationarity_polynomial(p);
  double pa = grid[best - 1], pb = grid[best + 1];
  double fa = eval_poly(poly, pa), fb = eval_poly(poly, pb);
  if (fa == 0.0) {
    pb = pa;
  } else if (fb == 0.0) {
    pa = pb;
  } else if ((fa > 0.0) == (fb > 0.0)) {
    throw std::runtime_error("stationarity polynomial of '" + std::string(to_string(p)) +
                             "' has no sign change near the extremum");
  }
  for (int it = 0; it < 200 && pb - pa > 1e-14 * pb; ++it) {
    const double mid = 0.5 * (pa + pb);
    const double fm = eval_poly(poly, mid);
    if ((fm > 0.0) == (fa > 0.0)) {
      pa = mid;
      fa = fm;
    } else {
      pb = mid;
    }
  }
  r.polynomial_root = 0.5 * (pa + pb);
  r.agrees = std::abs(r.rho_star - r.polynomial_root) <= 1e-4;
  return r;
}

/// Simulation settings used as an independent cross-check.
struct SimBudget {
  double events = 1e6;
  std::size_t replications = 20;
  double warmup = 0.1;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

struct ConjectureRow {
  double rho = 0.0;
  double aaoi = 0.0; ///< converged truncated-SHS M/M/1-PS AAoI (mu = 1)
  double c = 0.0;    ///< mu * aaoi - 1/rho - 1
  std::size_t truncation = 0;
  double truncation_change = 0.0; ///< |aaoi(N) - aaoi(N - step)|
  bool converged = false;
  ConjectureBounds bounds;
  bool within_general = false;
  bool within_large_rho = false; ///< meaningful only if bounds.large_rho_applicable
  double lemma1_bound = 0.0;
  bool lemma1_holds = false;
  std::optional<double> sim_mean;
  std::optional<double> sim_ci95;
  std::optional<double> sim_std_error;
  std::optional<bool> sim_agrees;
  /// A general bound is violated by both the SHS value and the simulation interval.
  bool violation_confirmed = false;
};

struct ConjectureOptions {
  std::size_t start_packets = 20;
  std::size_t step = 40;
  std::size_t max_packets = 400;
  double rel_tol = 1e-7; ///< successive-change tolerance declaring convergence
  std::optional<SimBudget> simulation;
};

struct ConvergedAaoi {
  double aaoi = 0.0;
  std::size_t truncation = 0;
  double change = 0.0;
  bool converged = false;
};

/// Truncated single-source M/M/1 AAoI at load rho (mu = 1), growing N until
/// successive values agree to `rel_tol`.
inline ConvergedAaoi converged_mm1(shs::Discipline d, double rho, const ConjectureOptions& o) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("M/M/1 truncation needs 0 < rho < 1");
  const double lambdas[] = {rho};
  ConvergedAaoi out;
  std::optional<double> prev;
  for (std::size_t n = o.start_packets; n <= o.max_packets; n += o.step) {
    const double a = shs::solve_age_system(shs::build_truncated_mm1(d, lambdas, 1.0, {n, o.max_packets})).aaoi;
    out.aaoi = a;
    out.truncation = n;
    if (prev) {
      out.change = std::abs(a - *prev);
      if (out.change <= o.rel_tol * a) {
        out.converged = true;
        return out;
      }
    }
    prev = a;
  }
  return out;
}

/// C(rho) for M/M/1-PS at each load, with the conjectured bounds, the lower bound and
/// an optional simulation cross-check.
inline std::vector<ConjectureRow> conjecture_evidence(const std::vector<double>& rho_grid, const ConjectureOptions& o = {}) {
  std::vector<ConjectureRow> rows;
  for (double rho : rho_grid) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("conjecture evidence needs every rho in (0, 1)");
    ConjectureRow row;
    row.rho = rho;
    const auto conv = converged_mm1(shs::Discipline::PS, rho, o);
    row.aaoi = conv.aaoi;
    row.truncation = conv.truncation;
    row.truncation_change = conv.change;
    row.converged = conv.converged;
    row.c = row.aaoi - 1.0 / rho - 1.0;
    row.bounds = conjecture_bounds(rho);
    row.within_general = row.c >= row.bounds.lower && row.c <= row.bounds.upper;
    row.within_large_rho = row.c >= row.bounds.large_rho_lower && row.c <= row.bounds.large_rho_upper;
    row.lemma1_bound = aaoi(ClosedForm::MM1_PS_LOWER_BOUND, RateParams(rho, 1.0));
    row.lemma1_holds = row.aaoi > row.lemma1_bound;
    if (o.simulation) {
      sim::SimConfig cfg;
      cfg.model = {sim::Discipline::PS, 0, sim::FullPolicy::Block};
      cfg.lambdas = {rho};
      cfg.mu = 1.0;
      cfg.horizon = sim::Horizon::events(o.simulation->events);
      cfg.warmup = o.simulation->warmup;
      cfg.seed = o.simulation->seed;
      cfg.replications = o.simulation->replications;
      cfg.threads = o.simulation->threads;
      const auto est = sim::simulate(cfg);
      const auto& s = est.sources[0];
      row.sim_mean = s.mean_age;
      row.sim_ci95 = s.ci95;
      row.sim_std_error = s.std_error;
      row.sim_agrees = std::abs(s.mean_age - row.aaoi) <= 3.0 * s.std_error;
      const double c_lo = s.mean_age - s.ci95 - 1.0 / rho - 1.0;
      const double c_hi = s.mean_age + s.ci95 - 1.0 / rho - 1.0;
      row.violation_confirmed = !row.within_general && (c_hi < row.bounds.lower || c_lo > row.bounds.upper);
    } else {
      row.violation_confirmed = !row.within_general && row.converged;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Evaluates a proposition on `grid` (loads rho with mu = 1).
inline BoundReport verify_bound(Proposition p, const std::vector<double>& grid, std::string grid_description = "",
                                const ConjectureOptions& mm1_options = {}) {
  if (grid.empty()) throw std::invalid_argument("verify_bound: empty grid");
  for (double rho : grid)
    if (!(rho > 0.0) || !std::isfinite(rho)) throw std::domain_error("verify_bound: loads must be positive");
  BoundReport rep;
  rep.proposition = p;
  rep.grid = std::move(grid_description);
  rep.pass = true;
  rep.min_value = std::numeric_limits<double>::infinity();
  rep.max_value = -std::numeric_limits<double>::infinity();

  auto add = [&](BoundRow row) {
    if (row.value < rep.min_value) {
      rep.min_value = row.value;
      rep.rho_at_min = row.rho;
    }
    if (row.value > rep.max_value) {
      rep.max_value = row.value;
      rep.rho_at_max = row.rho;
    }
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  };

  if (is_ratio_claim(p)) {
    const RatioClaim c = ratio_claim(p);
    rep.lower = c.lower;
    rep.upper = c.upper;
    for (double rho : grid) {
      const double v = claim_ratio(c, rho);
      rep.literal_excess = std::max({rep.literal_excess, c.lower - v, v - c.upper});
      add({rho, v, c.lower, c.upper, v >= c.lower - c.lower_tol && v <= c.upper + c.upper_tol});
    }
    if (c.extremum != RatioClaim::Extremum::None) rep.rho_star = find_ratio_extremum(p).rho_star;
    return rep;
  }

  for (double rho : grid)
    if (!(rho < 1.0)) throw std::domain_error("verify_bound: '" + std::string(to_string(p)) + "' needs every rho < 1");

  if (p == Proposition::LEMMA1) {
    // value = truncated M/M/1-PS AAoI divided by the lower bound; must exceed 1.
    rep.lower = 1.0;
    rep.upper = std::numeric_limits<double>::infinity();
    for (double rho : grid) {
      const auto conv = converged_mm1(shs::Discipline::PS, rho, mm1_options);
      const double bound = aaoi(ClosedForm::MM1_PS_LOWER_BOUND, RateParams(rho, 1.0));
      const double v = conv.aaoi / bound;
      add({rho, v, 1.0, rep.upper, conv.converged && conv.aaoi > bound});
    }
    return rep;
  }

  // CONJ1: value = C(rho) against [0, rho^2/(1-rho)] per point.
  rep.lower = 0.0;
  rep.upper = std::numeric_limits<double>::infinity();
  for (const ConjectureRow& r : conjecture_evidence(grid, mm1_options))
    add({r.rho, r.c, r.bounds.lower, r.bounds.upper, r.converged && !r.violation_confirmed && r.within_general});
  return rep;
}

// --- two-source comparisons ---------------------------------------------

enum class TwoSourceModel { PS, FGFS, MM11S };
enum class Objective { Source1, Sum };
enum class Method { ShsTruncated, Simulate };

inline std::string_view to_string(TwoSourceModel m) noexcept {
  switch (m) {
  case TwoSourceModel::PS: return "ps";
  case TwoSourceModel::FGFS: return "fgfs";
  case TwoSourceModel::MM11S: return "mm11star";
  }
  return "?";
}
inline std::string_view to_string(Objective o) noexcept { return o == Objective::Source1 ? "source1" : "sum"; }
inline std::string_view to_string(Method m) noexcept { return m == Method::ShsTruncated ? "shs" : "simulate"; }

inline TwoSourceModel parse_two_source_model(std::string_view s) {
  if (s == "ps") return TwoSourceModel::PS;
  if (s == "fgfs") return TwoSourceModel::FGFS;
  if (s == "mm11star" || s == "mm11s") return TwoSourceModel::MM11S;
  throw std::invalid_argument("unknown two-source model '" + std::string(s) + "'; valid: ps fgfs mm11star");
}
inline Objective parse_objective(std::string_view s) {
  if (s == "source1") return Objective::Source1;
  if (s == "sum") return Objective::Sum;
  throw std::invalid_argument("unknown objective '" + std::string(s) + "'; valid: source1 sum");
}
inline Method parse_method(std::string_view s) {
  if (s == "shs" || s == "shs-truncated") return Method::ShsTruncated;
  if (s == "simulate" || s == "sim") return Method::Simulate;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'; valid: shs simulate");
}

struct SweepConfig {
  double lambda1 = 0.1;
  std::vector<double> lambda2;
  double mu = 1.0;
  std::vector<TwoSourceModel> models{TwoSourceModel::PS, TwoSourceModel::FGFS, TwoSourceModel::MM11S};
  Objective objective = Objective::Source1;
  Method method = Method::ShsTruncated;
  /// Buffer size of the PS and FGFS queues (blocking), in both methods.
  std::size_t max_packets = shs::kDefaultCapTwoSources;
  SimBudget simulation;
  std::optional<double> sim_time_horizon; ///< simulate for this much time instead of an event count
};

struct SweepRow {
  double lambda2 = 0.0;
  TwoSourceModel model = TwoSourceModel::PS;
  Objective objective = Objective::Source1;
  double aaoi = 0.0;
  Method method = Method::ShsTruncated;
  double ci95 = 0.0; ///< 0 for the deterministic SHS method
  bool overloaded = false; ///< (lambda1 + lambda2) / mu >= 1: the buffer limit dominates
};

/// Two-source AAoI of one model at one lambda2 by the truncated SHS.
inline double two_source_shs(TwoSourceModel model, double lambda1, double lambda2, double mu, Objective obj,
                             std::size_t max_packets) {
  const double rates[] = {lambda1, lambda2};
  auto one = [&](std::size_t soi) {
    if (model == TwoSourceModel::MM11S) return shs::solve_age_system(shs::build_preemptive_server(rates, mu, soi)).aaoi;
    const auto d = model == TwoSourceModel::PS ? shs::Discipline::PS : shs::Discipline::FGFS;
    return shs::solve_age_system(shs::build_truncated_mm1(d, rates, mu, {max_packets, max_packets}, soi)).aaoi;
  };
  return obj == Objective::Source1 ? one(0) : one(0) + one(1);
}

inline sim::QueueModel two_source_queue(TwoSourceModel model, std::size_t max_packets) {
  switch (model) {
  case TwoSourceModel::PS: return {sim::Discipline::PS, max_packets, sim::FullPolicy::Block};
  case TwoSourceModel::FGFS: return {sim::Discipline::FGFS, max_packets, sim::FullPolicy::Block};
  case TwoSourceModel::MM11S: return {sim::Discipline::FGFS, 1, sim::FullPolicy::ReplaceOldest};
  }
  throw std::invalid_argument("unknown model");
}

/// Mean and 95% half-width of the objective from a simulation estimate.
inline std::pair<double, double> objective_estimate(const sim::SimEstimate& est, Objective obj) {
  if (obj == Objective::Source1) return {est.sources[0].mean_age, est.sources[0].ci95};
  const std::size_t reps = est.replication_means.size();
  std::vector<double> sums(reps);
  for (std::size_t r = 0; r < reps; ++r) sums[r] = est.replication_means[r][0] + est.replication_means[r][1];
  double mean = 0.0;
  for (double s : sums) mean += s;
  mean /= static_cast<double>(reps);
  if (reps < 2) return {mean, std::numeric_limits<double>::infinity()};
  double ss = 0.0;
  for (double s : sums) ss += (s - mean) * (s - mean);
  const double se = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  const boost::math::students_t dist(static_cast<double>(reps - 1));
  return {mean, boost::math::quantile(boost::math::complement(dist, 0.025)) * se};
}

inline sim::SimConfig two_source_sim_config(const SweepConfig& c, TwoSourceModel model, double lambda2,
                                            std::size_t point_index) {
  sim::SimConfig cfg;
  cfg.model = two_source_queue(model, c.max_packets);
  cfg.lambdas = {c.lambda1, lambda2};
  cfg.mu = c.mu;
  cfg.horizon = c.sim_time_horizon ? sim::Horizon::time(*c.sim_time_horizon) : sim::Horizon::events(c.simulation.events);
  cfg.warmup = c.simulation.warmup;
  // Same seed for every model at a grid point: common random numbers.
  cfg.seed = sim::splitmix64(c.simulation.seed + point_index);
  cfg.replications = c.simulation.replications;
  cfg.threads = c.simulation.threads;
  return cfg;
}

/// One row per (lambda2, model), in grid order then model order.
inline std::vector<SweepRow> two_source_sweep(const SweepConfig& c) {
  if (c.lambda2.empty()) throw std::invalid_argument("two_source_sweep: empty lambda2 range");
  if (!(c.lambda1 > 0.0)) throw std::invalid_argument("two_source_sweep: lambda1 must be > 0");
  for (double l2 : c.lambda2)
    if (!(l2 > 0.0)) throw std::invalid_argument("two_source_sweep: lambda2 values must be > 0");
  if (c.method == Method::ShsTruncated && c.max_packets > shs::kDefaultCapTwoSources)
    throw std::invalid_argument("two_source_sweep: N = " + std::to_string(c.max_packets) +
                                " exceeds the two-source state cap " + std::to_string(shs::kDefaultCapTwoSources));
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < c.lambda2.size(); ++i) {
    const double l2 = c.lambda2[i];
    for (TwoSourceModel m : c.models) {
      SweepRow row;
      row.lambda2 = l2;
      row.model = m;
      row.objective = c.objective;
      row.method = c.method;
      row.overloaded = m != TwoSourceModel::MM11S && (c.lambda1 + l2) / c.mu >= 1.0;
      if (c.method == Method::ShsTruncated) {
        row.aaoi = two_source_shs(m, c.lambda1, l2, c.mu, c.objective, c.max_packets);
      } else {
        const auto est = sim::simulate(two_source_sim_config(c, m, l2, i));
        std::tie(row.aaoi, row.ci95) = objective_estimate(est, c.objective);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

} // namespace aoi::analysis
