#pragma once

// Independent reference values for the tests: an exact rational SHS solver and
// the published per-state age-correlation vectors.

#include "aoi/closed_form.hpp"
#include "aoi/shs.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using Q = boost::multiprecision::cpp_rational;

/// Exact Gauss-Jordan solve of a small dense system.
inline std::vector<Q> solve_exact(std::vector<std::vector<Q>> a, std::vector<Q> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::runtime_error("singular exact system");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Q f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

struct ExactSolution {
  std::vector<Q> pi;
  std::vector<std::vector<Q>> v;
  Q aaoi;
};

/// Solves an SHS model exactly; every rate must be a finite double (converted
/// exactly to a rational).
inline ExactSolution solve_shs_exact(const aoi::shs::Model& m) {
  const std::size_t n = m.num_states(), d = m.age_dim();
  std::vector<std::vector<Q>> a(n, std::vector<Q>(n));
  std::vector<Q> rhs(n);
  for (const auto& t : m.transitions()) {
    if (t.from == t.to) continue;
    const Q r(t.rate);
    a[t.to][t.from] += r;
    a[t.from][t.from] -= r;
  }
  for (std::size_t q = 0; q < n; ++q) a[n - 1][q] = 1;
  rhs[n - 1] = 1;
  ExactSolution s;
  s.pi = solve_exact(a, rhs);

  const std::size_t u = n * d;
  std::vector<std::vector<Q>> sys(u, std::vector<Q>(u));
  std::vector<Q> b(u);
  std::vector<Q> out(n);
  for (const auto& t : m.transitions()) out[t.from] += Q(t.rate);
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t j = 0; j < d; ++j) {
      sys[q * d + j][q * d + j] += out[q];
      b[q * d + j] = Q(m.states()[q].growth[j]) * s.pi[q];
    }
  for (const auto& t : m.transitions())
    for (std::size_t j = 0; j < d; ++j) {
      const int src = t.reset.source(j);
      if (src == aoi::shs::ResetMap::kZero) continue;
      sys[t.to * d + j][t.from * d + static_cast<std::size_t>(src)] -= Q(t.rate);
    }
  // Structurally-zero coordinates make the system singular only if a state has
  // no exit; a zero row is pinned to v = 0.
  for (std::size_t i = 0; i < u; ++i) {
    bool any = false;
    for (const Q& x : sys[i]) any = any || x != 0;
    if (!any) sys[i][i] = 1;
  }
  const auto x = solve_exact(sys, b);
  s.v.assign(n, std::vector<Q>(d));
  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t j = 0; j < d; ++j) s.v[q][j] = x[q * d + j];
  for (std::size_t q = 0; q < n; ++q) s.aaoi += s.v[q][0];
  return s;
}

/// Closed form evaluated exactly from its rational coefficients.
inline Q closed_form_exact(aoi::ClosedForm id, const Q& lambda, const Q& mu) {
  const auto f = aoi::rational_form(id);
  auto eval = [&](const aoi::HomogeneousPoly& p) {
    Q acc = 0;
    const auto c = p.coefficients();
    const std::size_t deg = p.degree();
    for (std::size_t k = 0; k < c.size(); ++k) {
      Q term = Q(c[k]);
      for (std::size_t i = 0; i < k; ++i) term *= lambda;
      for (std::size_t i = 0; i < deg - k; ++i) term *= mu;
      acc += term;
    }
    return acc;
  };
  return eval(f.numerator) / eval(f.denominator);
}

/// Published v-vectors of the three buffer-2 PS queues as [state][coordinate]
/// (components not listed are zero).
enum class PublishedModel { MM12_PS, MM12S_PS, MM12SS_PS, MM12SS_FGFS };

inline std::array<std::array<double, 3>, 3> published_v(PublishedModel model, double l, double m) {
  const double quad = l * l + m * m + l * m;
  const double lm = l + m;
  std::array<std::array<double, 3>, 3> v{};
  switch (model) {
  case PublishedModel::MM12_PS:
    v[0][0] = m * lm / (l * quad);
    v[1][0] = (3 * l * l + 2 * m * m + 4 * l * m) / (2 * lm * quad);
    v[1][1] = l / quad;
    v[2][0] = (5 * l * l * l + 6 * l * l * m + 2 * l * m * m) / (2 * m * lm * quad);
    v[2][1] = 2 * l * l / (m * quad);
    v[2][2] = l * l / (m * quad);
    break;
  case PublishedModel::MM12S_PS:
    v[0][0] = (3 * l * l * m * m + 3 * l * m * m * m + m * m * m * m) / (l * lm * lm * quad);
    v[1][0] = (l * l * l * l + 7 * l * l * l * m + 13 * l * l * m * m + 8 * l * m * m * m + 2 * m * m * m * m) /
              (2 * lm * lm * lm * quad);
    v[1][1] = (2 * l * l * m + l * m * m) / (lm * lm * quad);
    // As printed; this component equals the full AAoI and is known to be off.
    v[2][0] = (3 * std::pow(l, 5) + 11 * std::pow(l, 4) * m + 15 * std::pow(l, 3) * m * m + 14 * l * l * std::pow(m, 3) +
               8 * l * std::pow(m, 4) + 2 * std::pow(m, 5)) /
              (2 * l * m * lm * lm * quad);
    v[2][1] = (std::pow(l, 4) + 4 * std::pow(l, 3) * m + 2 * l * l * m * m) / (m * lm * lm * quad);
    v[2][2] = l * l / (lm * quad);
    break;
  case PublishedModel::MM12SS_PS:
    v[0][0] = (3 * l * l * m * m + 3 * l * m * m * m + m * m * m * m) / (l * lm * lm * quad);
    v[1][0] = (5 * std::pow(l, 4) * m + 19 * std::pow(l, 3) * m * m + 21 * l * l * std::pow(m, 3) +
               10 * l * std::pow(m, 4) + 2 * std::pow(m, 5)) /
              (2 * std::pow(lm, 4) * quad);
    v[1][1] = (2 * l * l * m + l * m * m) / (lm * lm * quad);
    v[2][0] = (2 * std::pow(l, 6) + 13 * std::pow(l, 5) * m + 31 * std::pow(l, 4) * m * m +
               29 * std::pow(l, 3) * std::pow(m, 3) + 12 * l * l * std::pow(m, 4) + 2 * l * std::pow(m, 5)) /
              (2 * m * std::pow(lm, 4) * quad);
    v[2][1] = (2 * std::pow(l, 4) + 5 * std::pow(l, 3) * m + 2 * l * l * m * m) / (std::pow(lm, 3) * quad);
    v[2][2] = l * l / (lm * quad);
    break;
  case PublishedModel::MM12SS_FGFS:
    v[0][0] = (3 * l * l * m * m + 3 * l * m * m * m + m * m * m * m) / (l * lm * lm * quad);
    v[1][0] = (3 * std::pow(l, 4) * m + 11 * std::pow(l, 3) * m * m + 11 * l * l * std::pow(m, 3) +
               5 * l * std::pow(m, 4) + std::pow(m, 5)) /
              (std::pow(lm, 4) * quad);
    v[1][1] = (2 * l * l * m + l * m * m) / (lm * lm * quad);
    v[2][0] = (std::pow(l, 6) + 7 * std::pow(l, 5) * m + 17 * std::pow(l, 4) * m * m + 15 * std::pow(l, 3) * std::pow(m, 3) +
               6 * l * l * std::pow(m, 4) + l * std::pow(m, 5)) /
              (m * std::pow(lm, 4) * quad);
    v[2][1] = (2 * std::pow(l, 4) + 5 * std::pow(l, 3) * m + 2 * l * l * m * m) / (std::pow(lm, 3) * quad);
    v[2][2] = l * l / (lm * quad);
    break;
  }
  return v;
}

inline aoi::ClosedForm closed_form_of(PublishedModel m) {
  switch (m) {
  case PublishedModel::MM12_PS: return aoi::ClosedForm::MM12_PS;
  case PublishedModel::MM12S_PS: return aoi::ClosedForm::MM12S_PS;
  case PublishedModel::MM12SS_PS: return aoi::ClosedForm::MM12SS_PS;
  case PublishedModel::MM12SS_FGFS: return aoi::ClosedForm::MM12SS_FGFS;
  }
  throw std::invalid_argument("model");
}

} // namespace oracle
