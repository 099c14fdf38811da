#pragma once

// Stochastic hybrid system (SHS) age analysis for finite discrete-state
// chains whose transitions reset the continuous age vector by coordinate
// selection. For each state q the stationary age-correlation vector v_q
// solves
//
//   v_q * (total rate out of q) = b_q * pi_q + sum_{l: to(l)=q} rate_l * v_{from(l)} A_l
//
// and the average age is sum_q v_q[0].

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aoi::shs {

/// Raised when a model is malformed (reducible chain, bad indices, singular system).
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when the age system has no nonnegative solution.
class MethodInapplicable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// x' = A x where each output coordinate copies one input coordinate or is zeroed.
class ResetMap {
public:
  static constexpr int kZero = -1;

  ResetMap() = default;
  /// `sources[j]` is the input coordinate copied into output j, or kZero.
  explicit ResetMap(std::vector<int> sources) : src_(std::move(sources)) {}

  static ResetMap identity(std::size_t dim) {
    std::vector<int> s(dim);
    for (std::size_t j = 0; j < dim; ++j) s[j] = static_cast<int>(j);
    return ResetMap(std::move(s));
  }

  std::size_t dim() const noexcept { return src_.size(); }
  int source(std::size_t j) const { return src_.at(j); }
  const std::vector<int>& sources() const noexcept { return src_; }

  /// Dense {0,1} matrix with x' = A x.
  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
    for (std::size_t j = 0; j < dim(); ++j)
      if (src_[j] != kZero) a(static_cast<Eigen::Index>(j), src_[j]) = 1.0;
    return a;
  }

  friend bool operator==(const ResetMap&, const ResetMap&) = default;

private:
  std::vector<int> src_;
};

struct State {
  std::string label;
  std::vector<std::uint8_t> growth; ///< b_q; entry 0 must be 1
};

struct Transition {
  int id = 0; ///< the table's l
  double rate = 0.0;
  std::size_t from = 0;
  std::size_t to = 0;
  ResetMap reset;
};

class Model {
public:
  Model() = default;
  explicit Model(std::size_t age_dim, std::size_t source_of_interest = 0)
      : dim_(age_dim), source_of_interest_(source_of_interest) {
    if (age_dim == 0) throw ModelError("age dimension must be >= 1");
  }

  std::size_t add_state(std::string label, std::vector<std::uint8_t> growth) {
    if (growth.size() != dim_) throw ModelError("growth vector of state '" + label + "' has wrong length");
    if (growth[0] != 1) throw ModelError("the monitor age must grow in every state ('" + label + "')");
    states_.push_back({std::move(label), std::move(growth)});
    return states_.size() - 1;
  }

  void add_transition(std::size_t from, std::size_t to, double rate, ResetMap reset) {
    add_transition(static_cast<int>(transitions_.size()), from, to, rate, std::move(reset));
  }

  void add_transition(int id, std::size_t from, std::size_t to, double rate, ResetMap reset) {
    if (from >= states_.size() || to >= states_.size()) throw ModelError("transition references unknown state");
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ModelError("transition rates must be finite and > 0");
    if (reset.dim() != dim_) throw ModelError("reset map has wrong dimension");
    for (int s : reset.sources())
      if (s != ResetMap::kZero && (s < 0 || static_cast<std::size_t>(s) >= dim_))
        throw ModelError("reset map copies from an out-of-range coordinate");
    transitions_.push_back({id, rate, from, to, std::move(reset)});
  }

  std::size_t age_dim() const noexcept { return dim_; }
  std::size_t source_of_interest() const noexcept { return source_of_interest_; }
  std::size_t num_states() const noexcept { return states_.size(); }
  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }

  /// Throws ModelError unless every state has an exit and the chain is one
  /// communicating class.
  void validate() const {
    const std::size_t n = states_.size();
    if (n == 0) throw ModelError("model has no states");
    std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
    std::vector<bool> has_exit(n, false);
    for (const Transition& t : transitions_) {
      has_exit[t.from] = true;
      fwd[t.from].push_back(t.to);
      bwd[t.to].push_back(t.from);
    }
    for (std::size_t q = 0; q < n; ++q)
      if (!has_exit[q]) throw ModelError("state '" + states_[q].label + "' has no outgoing transition");
    auto reach_all = [n](const std::vector<std::vector<std::size_t>>& adj) {
      std::vector<bool> seen(n, false);
      std::vector<std::size_t> stack{0};
      seen[0] = true;
      std::size_t count = 1;
      while (!stack.empty()) {
        std::size_t q = stack.back();
        stack.pop_back();
        for (std::size_t r : adj[q])
          if (!seen[r]) {
            seen[r] = true;
            ++count;
            stack.push_back(r);
          }
      }
      return count == n;
    };
    if (!reach_all(fwd) || !reach_all(bwd)) throw ModelError("discrete chain is not irreducible");
  }

private:
  std::size_t dim_ = 1;
  std::size_t source_of_interest_ = 0;
  std::vector<State> states_;
  std::vector<Transition> transitions_;
};

struct AgeSystemSolution {
  std::vector<double> pi;
  std::vector<std::vector<double>> v; ///< v[q][j]
  double aaoi = 0.0;
  double max_relative_residual = 0.0;
  std::size_t unknowns = 0; ///< after dropping structurally-zero coordinates
};

/// Systems up to this many unknowns use dense LU; larger ones sparse LU.
inline constexpr std::size_t kDenseLimit = 2000;

namespace detail {

inline Eigen::VectorXd solve_linear(const std::vector<Eigen::Triplet<double>>& entries, std::size_t n,
                                    const Eigen::VectorXd& rhs, const char* what) {
  const auto size = static_cast<Eigen::Index>(n);
  if (n <= kDenseLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    for (const auto& e : entries) a(e.row(), e.col()) += e.value();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd x = lu.solve(rhs);
    if (!x.allFinite()) throw ModelError(std::string(what) + ": singular system");
    // Partial pivoting does not report singularity; confirm via the residual.
    const double scale = a.cwiseAbs().maxCoeff() * std::max(1.0, x.cwiseAbs().maxCoeff());
    if ((a * x - rhs).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, rhs.cwiseAbs().maxCoeff()))
      throw ModelError(std::string(what) + ": singular system");
    return x;
  }
  Eigen::SparseMatrix<double> a(size, size);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw ModelError(std::string(what) + ": singular system (" + lu.lastErrorMessage() + ")");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw ModelError(std::string(what) + ": solve failed");
  return x;
}

} // namespace detail

/// Stationary distribution of the discrete chain (self-loops ignored).
inline std::vector<double> stationary_distribution(const Model& m) {
  m.validate();
  const std::size_t n = m.num_states();
  if (n == 1) return {1.0};
  // Rows: balance for states 0..n-2, last row normalization.
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> out(n, 0.0);
  for (const Transition& t : m.transitions()) {
    if (t.from == t.to) continue;
    out[t.from] += t.rate;
    if (t.to != n - 1)
      entries.emplace_back(static_cast<int>(t.to), static_cast<int>(t.from), t.rate);
  }
  for (std::size_t q = 0; q + 1 < n; ++q) entries.emplace_back(static_cast<int>(q), static_cast<int>(q), -out[q]);
  for (std::size_t q = 0; q < n; ++q) entries.emplace_back(static_cast<int>(n - 1), static_cast<int>(q), 1.0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  rhs(static_cast<Eigen::Index>(n - 1)) = 1.0;
  Eigen::VectorXd x = detail::solve_linear(entries, n, rhs, "stationary distribution");
  std::vector<double> pi(n);
  for (std::size_t q = 0; q < n; ++q) pi[q] = std::max(0.0, x(static_cast<Eigen::Index>(q)));
  double total = 0.0;
  for (double p : pi) total += p;
  for (double& p : pi) p /= total;
  return pi;
}

/// Largest |inflow - outflow| over states, relative to the largest exit rate.
inline double balance_residual(const Model& m, const std::vector<double>& pi) {
  std::vector<double> net(m.num_states(), 0.0);
  double max_rate = 0.0;
  std::vector<double> out(m.num_states(), 0.0);
  for (const Transition& t : m.transitions()) {
    if (t.from == t.to) continue;
    net[t.from] -= t.rate * pi[t.from];
    net[t.to] += t.rate * pi[t.from];
    out[t.from] += t.rate;
  }
  for (double r : out) max_rate = std::max(max_rate, r);
  double worst = 0.0;
  for (double x : net) worst = std::max(worst, std::abs(x));
  return max_rate > 0.0 ? worst / max_rate : 0.0;
}

/// Marks (q, j) pairs whose v entry is identically zero: b_q[j] = 0 and every
/// inflow either zeroes j or copies a coordinate that is itself always zero.
inline std::vector<std::vector<bool>> structurally_nonzero(const Model& m) {
  const std::size_t n = m.num_states(), d = m.age_dim();
  std::vector<std::vector<bool>> live(n, std::vector<bool>(d, false));
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t j = 0; j < d; ++j) live[q][j] = m.states()[q].growth[j] != 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Transition& t : m.transitions())
      for (std::size_t j = 0; j < d; ++j) {
        const int s = t.reset.source(j);
        if (s != ResetMap::kZero && !live[t.to][j] && live[t.from][static_cast<std::size_t>(s)]) {
          live[t.to][j] = true;
          changed = true;
        }
      }
  }
  return live;
}

/// Solves the age-correlation system and returns pi, v and the AAoI.
inline AgeSystemSolution solve_age_system(const Model& m) {
  AgeSystemSolution sol;
  sol.pi = stationary_distribution(m);
  const std::size_t n = m.num_states(), d = m.age_dim();

  const auto live = structurally_nonzero(m);
  std::vector<std::vector<long>> index(n, std::vector<long>(d, -1));
  std::size_t unknowns = 0;
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t j = 0; j < d; ++j)
      if (live[q][j]) index[q][j] = static_cast<long>(unknowns++);
  sol.unknowns = unknowns;

  std::vector<double> out(n, 0.0);
  for (const Transition& t : m.transitions()) out[t.from] += t.rate;

  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns));
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t j = 0; j < d; ++j)
      if (index[q][j] >= 0) {
        entries.emplace_back(index[q][j], index[q][j], out[q]);
        rhs(index[q][j]) = m.states()[q].growth[j] * sol.pi[q];
      }
  for (const Transition& t : m.transitions())
    for (std::size_t j = 0; j < d; ++j) {
      const int s = t.reset.source(j);
      if (s == ResetMap::kZero) continue;
      const long row = index[t.to][j];
      const long col = index[t.from][static_cast<std::size_t>(s)];
      if (row >= 0 && col >= 0) entries.emplace_back(row, col, -t.rate);
    }

  Eigen::VectorXd x = detail::solve_linear(entries, unknowns, rhs, "age system");

  // Per-equation residual relative to the magnitude of its terms.
  Eigen::VectorXd resid = -rhs;
  Eigen::VectorXd mag = rhs.cwiseAbs();
  for (const auto& e : entries) {
    resid(e.row()) += e.value() * x(e.col());
    mag(e.row()) += std::abs(e.value() * x(e.col()));
  }
  for (Eigen::Index i = 0; i < resid.size(); ++i)
    if (mag(i) > 0.0) sol.max_relative_residual = std::max(sol.max_relative_residual, std::abs(resid(i)) / mag(i));

  sol.v.assign(n, std::vector<double>(d, 0.0));
  double scale = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) scale = std::max(scale, std::abs(x(i)));
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t j = 0; j < d; ++j)
      if (index[q][j] >= 0) {
        double val = x(index[q][j]);
        if (!std::isfinite(val)) throw ModelError("age system produced a non-finite entry");
        if (val < 0.0) {
          if (val < -1e-9 * scale) {
            std::ostringstream msg;
            msg << "age system has a negative entry v[" << m.states()[q].label << "][" << j << "] = " << val
                << "; the SHS average-age method does not apply";
            throw MethodInapplicable(msg.str());
          }
          val = 0.0;
        }
        sol.v[q][j] = val;
      }
  for (std::size_t q = 0; q < n; ++q) sol.aaoi += sol.v[q][0];
  return sol;
}

inline std::string format_reset(const ResetMap& r) {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < r.dim(); ++j) {
    if (j) os << ',';
    os << 'x' << j;
  }
  os << "]->[";
  for (std::size_t j = 0; j < r.dim(); ++j) {
    if (j) os << ',';
    if (r.source(j) == ResetMap::kZero)
      os << '0';
    else
      os << 'x' << r.source(j);
  }
  os << ']';
  return os.str();
}

/// Plain-text SHS table, one row per transition: `l,rate,from,to,reset`.
inline std::string dump_table(const Model& m) {
  std::ostringstream os;
  os << "l,rate,from,to,reset\n";
  os << std::setprecision(12);
  for (const Transition& t : m.transitions())
    os << t.id << ',' << t.rate << ',' << m.states()[t.from].label << ',' << m.states()[t.to].label << ','
       << format_reset(t.reset) << '\n';
  return os.str();
}

} // namespace aoi::shs
