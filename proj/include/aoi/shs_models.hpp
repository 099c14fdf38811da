#pragma once

// SHS builders: the finite-buffer tables, truncated M/M/1 chains with one or
// two sources, and the multi-source preemptive single-packet server.

#include "aoi/closed_form.hpp"
#include "aoi/shs.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoi::shs {

enum class Discipline { PS, FGFS };

inline std::string_view to_string(Discipline d) noexcept { return d == Discipline::PS ? "ps" : "fgfs"; }

/// Blocking truncation of an infinite buffer at `max_packets` packets.
struct TruncationSpec {
  std::size_t max_packets = 2;
  /// Largest N accepted; 0 selects the default (60 for one source, 8 for two).
  std::size_t cap = 0;
};

inline constexpr std::size_t kDefaultCapOneSource = 60;
inline constexpr std::size_t kDefaultCapTwoSources = 8;

namespace detail {

inline ResetMap reset_of(std::initializer_list<int> src) { return ResetMap(std::vector<int>(src)); }

} // namespace detail

/// SHS table of a finite-buffer model, transitions numbered l0, l1, ...
inline Model build_finite_model(ClosedForm id, const RateParams& p) {
  using detail::reset_of;
  constexpr int Z = ResetMap::kZero;
  const double lam = p.lambda(), mu = p.mu();

  if (id == ClosedForm::MM11 || id == ClosedForm::MM11S) {
    Model m(2);
    m.add_state("0", {1, 0});
    m.add_state("1", {1, 1});
    m.add_transition(0, 0, 1, lam, reset_of({0, Z}));
    m.add_transition(1, 1, 0, mu, reset_of({1, Z}));
    // Arrival while busy: dropped (M/M/1/1) or preempts service (M/M/1/1*).
    m.add_transition(2, 1, 1, lam, id == ClosedForm::MM11 ? reset_of({0, 1}) : reset_of({0, Z}));
    return m;
  }
  if (!is_finite_buffer(id))
    throw std::invalid_argument("build_finite_model: '" + std::string(to_string(id)) +
                                "' has an infinite buffer; use build_truncated_mm1");

  Model m(3);
  m.add_state("0", {1, 0, 0});
  m.add_state("1", {1, 1, 0});
  m.add_state("2", {1, 1, 1});
  m.add_transition(0, 0, 1, lam, reset_of({0, Z, Z}));
  m.add_transition(1, 1, 0, mu, reset_of({1, Z, Z}));
  m.add_transition(2, 1, 2, lam, reset_of({0, 1, Z}));

  ResetMap when_full;
  switch (id) {
  case ClosedForm::MM12_PS:
  case ClosedForm::MM12_FGFS: when_full = reset_of({0, 1, 2}); break;
  case ClosedForm::MM12S_PS:
  case ClosedForm::MM12S_FGFS: when_full = reset_of({0, 1, Z}); break;
  default: when_full = reset_of({0, 2, Z}); break;
  }
  const bool ps = id == ClosedForm::MM12_PS || id == ClosedForm::MM12S_PS || id == ClosedForm::MM12SS_PS;
  if (ps) {
    m.add_transition(3, 2, 1, mu / 2.0, reset_of({1, 2, Z}));
    // The newest packet leaves first; the older one becomes a fake update.
    m.add_transition(4, 2, 1, mu / 2.0, reset_of({2, 2, Z}));
    m.add_transition(5, 2, 2, lam, when_full);
  } else {
    m.add_transition(3, 2, 1, mu, reset_of({1, 2, Z}));
    m.add_transition(4, 2, 2, lam, when_full);
  }
  return m;
}

/// Truncated M/M/1 queue with one or two Poisson sources sharing one
/// exponential server, arrivals blocked at `t.max_packets` packets.
///
/// Discrete states are source-label sequences, oldest packet first.
/// Coordinate 0 is the monitor age of `source_of_interest`; coordinate i+1
/// is the age of the i-th oldest packet if it belongs to that source (other
/// sources' slots stay zero). Under PS each of the n packets leaves at rate
/// mu/n; when the k-th oldest leaves, older packets of the same source are
/// replaced by fake updates carrying its age. Under FGFS only the oldest
/// leaves, at rate mu.
inline Model build_truncated_mm1(Discipline discipline, std::span<const double> lambdas, double mu,
                                 const TruncationSpec& t, std::size_t source_of_interest = 0) {
  if (lambdas.empty()) throw std::invalid_argument("build_truncated_mm1: empty rate list");
  if (lambdas.size() > 2) throw std::invalid_argument("build_truncated_mm1: at most two sources are supported");
  if (t.max_packets == 0) throw std::invalid_argument("build_truncated_mm1: max_packets must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("build_truncated_mm1: mu must be > 0");
  if (source_of_interest >= lambdas.size())
    throw std::invalid_argument("build_truncated_mm1: source_of_interest out of range");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("build_truncated_mm1: rates must be >= 0");
  if (!(lambdas[source_of_interest] > 0.0))
    throw std::invalid_argument("build_truncated_mm1: the source of interest needs a positive rate");

  // Zero-rate sources never enter the system; leave them out of the alphabet.
  std::vector<std::size_t> active;
  for (std::size_t s = 0; s < lambdas.size(); ++s)
    if (lambdas[s] > 0.0) active.push_back(s);
  const std::size_t k = active.size();
  const std::size_t n_max = t.max_packets;
  const std::size_t cap = t.cap != 0 ? t.cap : (lambdas.size() == 1 ? kDefaultCapOneSource : kDefaultCapTwoSources);
  if (n_max > cap)
    throw std::invalid_argument("build_truncated_mm1: N = " + std::to_string(n_max) + " exceeds the cap " +
                                std::to_string(cap) + " for " + std::to_string(lambdas.size()) + " source(s)");

  // offset[n] = number of sequences shorter than n.
  std::vector<std::size_t> offset(n_max + 2, 0);
  std::size_t power = 1;
  for (std::size_t n = 0; n <= n_max; ++n) {
    offset[n + 1] = offset[n] + power;
    if (offset[n + 1] > 2'000'000) throw std::invalid_argument("build_truncated_mm1: state count overflow");
    power *= k;
  }
  const std::size_t num_states = offset[n_max + 1];
  const std::size_t dim = n_max + 1;
  std::size_t soi_label = 0;
  for (std::size_t a = 0; a < k; ++a)
    if (active[a] == source_of_interest) soi_label = a;

  auto decode = [&](std::size_t index) {
    std::size_t n = 0;
    while (offset[n + 1] <= index) ++n;
    std::vector<std::uint8_t> seq(n);
    std::size_t code = index - offset[n];
    for (std::size_t i = n; i-- > 0;) {
      seq[i] = static_cast<std::uint8_t>(code % k);
      code /= k;
    }
    return seq;
  };
  auto encode = [&](const std::vector<std::uint8_t>& seq) {
    std::size_t code = 0;
    for (std::uint8_t a : seq) code = code * k + a;
    return offset[seq.size()] + code;
  };

  Model m(dim, source_of_interest);
  for (std::size_t q = 0; q < num_states; ++q) {
    const auto seq = decode(q);
    std::vector<std::uint8_t> b(dim, 0);
    b[0] = 1;
    for (std::size_t i = 0; i < seq.size(); ++i) b[i + 1] = seq[i] == soi_label ? 1 : 0;
    std::string label;
    if (lambdas.size() == 1) {
      label = std::to_string(seq.size());
    } else if (seq.empty()) {
      label = "-";
    } else {
      for (std::uint8_t a : seq) label += static_cast<char>('1' + active[a]);
    }
    m.add_state(std::move(label), std::move(b));
  }

  constexpr int Z = ResetMap::kZero;
  int next_id = 0;
  for (std::size_t q = 0; q < num_states; ++q) {
    const auto seq = decode(q);
    const std::size_t n = seq.size();
    auto keep = [&](std::size_t pos) { return seq[pos] == soi_label ? static_cast<int>(pos + 1) : Z; };

    for (std::size_t a = 0; a < k; ++a) {
      const double rate = lambdas[active[a]];
      std::vector<int> src(dim, Z);
      src[0] = 0;
      for (std::size_t i = 0; i < n; ++i) src[i + 1] = keep(i);
      if (n < n_max) {
        auto grown = seq;
        grown.push_back(static_cast<std::uint8_t>(a));
        m.add_transition(next_id++, q, encode(grown), rate, ResetMap(std::move(src)));
      } else {
        m.add_transition(next_id++, q, q, rate, ResetMap(std::move(src)));
      }
    }
    if (n == 0) continue;

    const std::size_t first = 0;
    const std::size_t last = discipline == Discipline::PS ? n : 1;
    const double rate = discipline == Discipline::PS ? mu / static_cast<double>(n) : mu;
    for (std::size_t leaving = first; leaving < last; ++leaving) {
      const bool mine = seq[leaving] == soi_label;
      std::vector<int> src(dim, Z);
      src[0] = mine ? static_cast<int>(leaving + 1) : 0;
      for (std::size_t i = 0; i < leaving; ++i)
        src[i + 1] = seq[i] != soi_label ? Z : (mine ? static_cast<int>(leaving + 1) : static_cast<int>(i + 1));
      for (std::size_t i = leaving + 1; i < n; ++i) src[i] = keep(i);
      auto shrunk = seq;
      shrunk.erase(shrunk.begin() + static_cast<std::ptrdiff_t>(leaving));
      m.add_transition(next_id++, q, encode(shrunk), rate, ResetMap(std::move(src)));
    }
  }
  return m;
}

/// Single-packet server where every arrival, from any source, preempts the
/// packet in service (multi-source M/M/1/1*). States: idle, serving-s.
inline Model build_preemptive_server(std::span<const double> lambdas, double mu, std::size_t source_of_interest = 0) {
  if (lambdas.empty()) throw std::invalid_argument("build_preemptive_server: empty rate list");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("build_preemptive_server: mu must be > 0");
  if (source_of_interest >= lambdas.size())
    throw std::invalid_argument("build_preemptive_server: source_of_interest out of range");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("build_preemptive_server: rates must be >= 0");
  if (!(lambdas[source_of_interest] > 0.0))
    throw std::invalid_argument("build_preemptive_server: the source of interest needs a positive rate");

  constexpr int Z = ResetMap::kZero;
  Model m(2, source_of_interest);
  m.add_state("idle", {1, 0});
  std::vector<std::size_t> serving(lambdas.size(), 0);
  for (std::size_t s = 0; s < lambdas.size(); ++s)
    if (lambdas[s] > 0.0)
      serving[s] = m.add_state("serving-" + std::to_string(s + 1),
                               {1, static_cast<std::uint8_t>(s == source_of_interest ? 1 : 0)});

  std::vector<std::size_t> occupied{0};
  for (std::size_t s = 0; s < lambdas.size(); ++s)
    if (lambdas[s] > 0.0) occupied.push_back(serving[s]);
  int next_id = 0;
  for (std::size_t q : occupied)
    for (std::size_t s = 0; s < lambdas.size(); ++s)
      if (lambdas[s] > 0.0) m.add_transition(next_id++, q, serving[s], lambdas[s], ResetMap({0, Z}));
  for (std::size_t s = 0; s < lambdas.size(); ++s)
    if (lambdas[s] > 0.0)
      m.add_transition(next_id++, serving[s], 0, mu, ResetMap({s == source_of_interest ? 1 : 0, Z}));
  return m;
}

struct TruncationPoint {
  std::size_t max_packets = 0;
  double aaoi = 0.0;
};

struct TruncationStudy {
  std::vector<TruncationPoint> points;
  bool converged = false;
  std::size_t converged_at = 0; ///< first N whose change from its predecessor is below tolerance
};

/// AAoI of `builder(N)` for each N in `n_list` (strictly increasing).
inline TruncationStudy aaoi_vs_truncation(const std::function<Model(std::size_t)>& builder,
                                          std::span<const std::size_t> n_list, double rel_tol = 1e-8) {
  if (n_list.empty()) throw std::invalid_argument("aaoi_vs_truncation: empty N list");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw std::invalid_argument("aaoi_vs_truncation: N list must be increasing");
  TruncationStudy study;
  for (std::size_t n : n_list) {
    const double a = solve_age_system(builder(n)).aaoi;
    if (!study.points.empty() && !study.converged) {
      const double prev = study.points.back().aaoi;
      if (std::abs(a - prev) <= rel_tol * std::abs(a)) {
        study.converged = true;
        study.converged_at = n;
      }
    }
    study.points.push_back({n, a});
  }
  return study;
}

} // namespace aoi::shs
