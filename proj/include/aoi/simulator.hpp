#pragma once

// Discrete-event Monte Carlo simulation of status-update queues.
//
// Markov-jump formulation: arrivals of source s form a Poisson process of
// rate lambda_s, and service completions are the ticks of a rate-mu Poisson
// clock that are ignored while the system is empty. Under PS the completing
// packet is uniform over the n in the system (rate mu/n each), under FGFS it
// is the oldest. Exact only for exponential service.
//
// Arrivals, service ticks, source labels and PS picks draw from separate
// streams, so two configurations run with the same seed share their arrival
// and service clocks (common random numbers).

#include "aoi/closed_form.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace aoi::sim {

enum class Discipline { PS, FGFS };

/// What happens to an arrival that finds the buffer full.
enum class FullPolicy {
  Block,         ///< arrival discarded (M/M/1/2, M/M/1/1)
  ReplaceNewest, ///< newest packet replaced (M/M/1/2*)
  ReplaceOldest, ///< oldest packet replaced, even if in service (M/M/1/2**, M/M/1/1*)
};

struct QueueModel {
  Discipline discipline = Discipline::PS;
  std::size_t capacity = 0; ///< 0 = unbounded
  FullPolicy policy = FullPolicy::Block;
};

/// Simulator configuration of a closed-form model id.
inline QueueModel queue_model(ClosedForm id) {
  switch (id) {
  case ClosedForm::MM12_PS: return {Discipline::PS, 2, FullPolicy::Block};
  case ClosedForm::MM12_FGFS: return {Discipline::FGFS, 2, FullPolicy::Block};
  case ClosedForm::MM12S_PS: return {Discipline::PS, 2, FullPolicy::ReplaceNewest};
  case ClosedForm::MM12S_FGFS: return {Discipline::FGFS, 2, FullPolicy::ReplaceNewest};
  case ClosedForm::MM12SS_PS: return {Discipline::PS, 2, FullPolicy::ReplaceOldest};
  case ClosedForm::MM12SS_FGFS: return {Discipline::FGFS, 2, FullPolicy::ReplaceOldest};
  case ClosedForm::MM11: return {Discipline::FGFS, 1, FullPolicy::Block};
  case ClosedForm::MM11S: return {Discipline::FGFS, 1, FullPolicy::ReplaceOldest};
  case ClosedForm::MM1_FGFS: return {Discipline::FGFS, 0, FullPolicy::Block};
  case ClosedForm::MM1_PS_LOWER_BOUND: return {Discipline::PS, 0, FullPolicy::Block};
  }
  throw std::invalid_argument("unknown model");
}

enum class HorizonKind { Events, Time };

struct Horizon {
  HorizonKind kind = HorizonKind::Events;
  double value = 1e6;

  static Horizon events(double n) { return {HorizonKind::Events, n}; }
  static Horizon time(double t) { return {HorizonKind::Time, t}; }
};

struct SimConfig {
  QueueModel model;
  std::vector<double> lambdas; ///< per-source arrival rates
  double mu = 1.0;
  Horizon horizon;
  double warmup = 0.1; ///< fraction of the horizon discarded
  std::uint64_t seed = 1;
  std::size_t replications = 20;
  std::size_t threads = 0; ///< 0 = hardware concurrency

  void validate() const {
    if (lambdas.empty()) throw std::invalid_argument("simulate: no sources");
    double total = 0.0;
    for (double l : lambdas) {
      if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("simulate: arrival rates must be >= 0");
      total += l;
    }
    if (!(total > 0.0)) throw std::invalid_argument("simulate: total arrival rate is zero");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("simulate: mu must be > 0");
    if (!(horizon.value > 0.0) || !std::isfinite(horizon.value)) throw std::invalid_argument("simulate: horizon must be > 0");
    if (!(warmup >= 0.0 && warmup < 1.0)) throw std::invalid_argument("simulate: warmup must be in [0, 1)");
    if (replications == 0) throw std::invalid_argument("simulate: replications must be >= 1");
  }
};

struct SourceEstimate {
  double mean_age = 0.0;
  double ci95 = 0.0;       ///< half-width of the 95% t-interval over replications
  double std_error = 0.0;
  std::uint64_t deliveries = 0; ///< fresh deliveries (the age dropped)
  std::uint64_t departures = 0; ///< all service completions of this source
  double throughput = 0.0;      ///< departures per unit measured time
};

struct SimEstimate {
  std::vector<SourceEstimate> sources;
  std::vector<std::vector<double>> replication_means; ///< [replication][source]
  std::uint64_t events = 0;
  double measured_time = 0.0;
  std::uint64_t seed = 0;
};

struct TracePoint {
  double time = 0.0;
  double age = 0.0;
};

/// 64-bit SplitMix mixer used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// mt19937_64 stream for (seed, replication, purpose).
class Stream {
public:
  Stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t purpose)
      : engine_(splitmix64(splitmix64(splitmix64(seed) ^ replication) ^ (purpose * 0xD1B54A32D192ED03ULL))) {}

  /// Uniform in (0, 1).
  double uniform() noexcept { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }
  std::size_t index(std::size_t n) noexcept { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }

private:
  std::mt19937_64 engine_;
};

namespace detail {

struct Packet {
  std::size_t source;
  double generated;
};

struct ReplicationResult {
  std::vector<double> area;
  std::vector<std::uint64_t> deliveries;
  std::vector<std::uint64_t> departures;
  double measured_time = 0.0;
  std::uint64_t events = 0;
};

/// One replication. If `trace` is non-null, records the age path of
/// `trace_source` over the measurement window (at most `max_points` points).
inline ReplicationResult run_replication(const SimConfig& c, std::uint64_t rep, std::vector<TracePoint>* trace = nullptr,
                                         std::size_t trace_source = 0, std::size_t max_points = 0) {
  const std::size_t k = c.lambdas.size();
  const double total_lambda = std::accumulate(c.lambdas.begin(), c.lambdas.end(), 0.0);
  Stream arrivals(c.seed, rep, 1), service(c.seed, rep, 2), labels(c.seed, rep, 3), picks(c.seed, rep, 4);

  const bool by_time = c.horizon.kind == HorizonKind::Time;
  const double end_time = by_time ? c.horizon.value : std::numeric_limits<double>::infinity();
  const auto end_events = by_time ? std::numeric_limits<std::uint64_t>::max()
                                  : static_cast<std::uint64_t>(std::ceil(c.horizon.value));
  const double warm_time = by_time ? c.warmup * c.horizon.value : 0.0;
  const auto warm_events = by_time ? 0 : static_cast<std::uint64_t>(std::ceil(c.warmup * c.horizon.value));

  ReplicationResult r;
  r.area.assign(k, 0.0);
  r.deliveries.assign(k, 0);
  r.departures.assign(k, 0);
  std::vector<double> last_generated(k, 0.0); // monitor ages start at 0 at t = 0
  std::vector<Packet> queue;                   // oldest first
  const std::size_t capacity = c.model.capacity;

  double now = 0.0;
  double next_arrival = arrivals.exponential(total_lambda);
  double next_tick = service.exponential(c.mu);
  bool measuring = by_time ? warm_time <= 0.0 : warm_events == 0;
  double measure_start = 0.0;
  std::uint64_t events = 0;

  auto record = [&](double t, double age) {
    if (trace && trace->size() < max_points) trace->push_back({t, age});
  };
  if (measuring) record(0.0, 0.0);

  auto advance = [&](double to) {
    if (measuring) {
      const double dt = to - now;
      for (std::size_t s = 0; s < k; ++s) {
        const double a0 = now - last_generated[s];
        r.area[s] += a0 * dt + 0.5 * dt * dt;
      }
    }
    now = to;
  };
  auto start_measuring = [&]() {
    measuring = true;
    measure_start = now;
    record(now, now - last_generated[trace_source]);
  };

  while (true) {
    const double t_next = std::min(next_arrival, next_tick);
    if (by_time && !measuring && t_next >= warm_time) {
      advance(warm_time);
      start_measuring();
    }
    if (t_next >= end_time) {
      advance(end_time);
      break;
    }
    if (events >= end_events) break;
    advance(t_next);

    if (next_arrival <= next_tick) {
      next_arrival = now + arrivals.exponential(total_lambda);
      std::size_t src = 0;
      if (k > 1) {
        double u = labels.uniform() * total_lambda;
        while (src + 1 < k && u >= c.lambdas[src]) u -= c.lambdas[src++];
      }
      const Packet p{src, now};
      if (capacity == 0 || queue.size() < capacity) {
        queue.push_back(p);
      } else {
        switch (c.model.policy) {
        case FullPolicy::Block: break;
        case FullPolicy::ReplaceNewest: queue.back() = p; break;
        case FullPolicy::ReplaceOldest:
          queue.erase(queue.begin());
          queue.push_back(p);
          break;
        }
      }
      ++events;
    } else {
      next_tick = now + service.exponential(c.mu);
      if (queue.empty()) continue; // idle tick, not an event
      const std::size_t idx = c.model.discipline == Discipline::PS ? picks.index(queue.size()) : 0;
      const Packet p = queue[idx];
      queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(idx));
      const bool fresh = p.generated > last_generated[p.source];
      if (fresh) {
        if (measuring && p.source == trace_source) record(now, now - last_generated[p.source]);
        last_generated[p.source] = p.generated;
        if (measuring && p.source == trace_source) record(now, now - p.generated);
      }
      if (measuring) {
        ++r.departures[p.source];
        if (fresh) ++r.deliveries[p.source];
      }
      ++events;
    }
    if (!by_time && !measuring && events >= warm_events) start_measuring();
  }
  if (measuring) record(now, now - last_generated[trace_source]);
  r.measured_time = measuring ? now - measure_start : 0.0;
  r.events = events;
  return r;
}

} // namespace detail

/// Time-average age per source with a 95% confidence interval across
/// independent replications. Identical (config, seed) give identical results.
inline SimEstimate simulate(const SimConfig& c) {
  c.validate();
  const std::size_t reps = c.replications;
  std::vector<detail::ReplicationResult> results(reps);

  std::size_t workers = c.threads != 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, reps);
  if (workers <= 1) {
    for (std::size_t r = 0; r < reps; ++r) results[r] = detail::run_replication(c, r);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t r = w; r < reps; r += workers) results[r] = detail::run_replication(c, r);
      }));
    for (auto& j : jobs) j.get();
  }

  const std::size_t k = c.lambdas.size();
  SimEstimate est;
  est.seed = c.seed;
  est.sources.resize(k);
  est.replication_means.assign(reps, std::vector<double>(k, 0.0));
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& res = results[r];
    if (!(res.measured_time > 0.0)) throw std::runtime_error("simulate: horizon too short, nothing measured after warmup");
    est.events += res.events;
    est.measured_time += res.measured_time;
    for (std::size_t s = 0; s < k; ++s) {
      est.replication_means[r][s] = res.area[s] / res.measured_time;
      est.sources[s].deliveries += res.deliveries[s];
      est.sources[s].departures += res.departures[s];
    }
  }
  for (std::size_t s = 0; s < k; ++s) {
    if (c.lambdas[s] > 0.0 && est.sources[s].deliveries == 0)
      throw std::runtime_error("simulate: no delivery of source " + std::to_string(s + 1) + " after warmup");
    SourceEstimate& e = est.sources[s];
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) sum += est.replication_means[r][s];
    e.mean_age = sum / static_cast<double>(reps);
    e.throughput = static_cast<double>(e.departures) / est.measured_time;
    if (reps < 2) {
      e.std_error = std::numeric_limits<double>::infinity();
      e.ci95 = std::numeric_limits<double>::infinity();
      continue;
    }
    double ss = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = est.replication_means[r][s] - e.mean_age;
      ss += d * d;
    }
    e.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
    const boost::math::students_t dist(static_cast<double>(reps - 1));
    e.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * e.std_error;
  }
  return est;
}

/// Age path of `source` during the first replication's measurement window:
/// piecewise-linear breakpoints with slope 1 between them and downward jumps
/// at fresh deliveries.
inline std::vector<TracePoint> sawtooth_trace(const SimConfig& c, std::size_t source, std::size_t max_points) {
  c.validate();
  if (max_points < 2) throw std::invalid_argument("sawtooth_trace: max_points must be >= 2");
  if (source >= c.lambdas.size()) throw std::invalid_argument("sawtooth_trace: source out of range");
  std::vector<TracePoint> trace;
  detail::run_replication(c, 0, &trace, source, max_points);
  return trace;
}

/// Integral of a sawtooth trace divided by its duration.
inline double trace_time_average(const std::vector<TracePoint>& trace) {
  if (trace.size() < 2) return trace.empty() ? 0.0 : trace.front().age;
  double area = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i)
    area += 0.5 * (trace[i].age + trace[i - 1].age) * (trace[i].time - trace[i - 1].time);
  const double span = trace.back().time - trace.front().time;
  return span > 0.0 ? area / span : trace.front().age;
}

} // namespace aoi::sim
