#include "aoi/closed_form.hpp"
#include "aoi/shs_models.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace aoi;

TEST(ClosedForm, ValuesAtUnitRates) {
  const RateParams p(1.0, 1.0);
  EXPECT_DOUBLE_EQ(aaoi(ClosedForm::MM12_PS, p), 2.5);
  EXPECT_DOUBLE_EQ(aaoi(ClosedForm::MM12_FGFS, p), 8.0 / 3.0);
  EXPECT_DOUBLE_EQ(aaoi(ClosedForm::MM12S_PS, p), 53.0 / 24.0);
  EXPECT_DOUBLE_EQ(aaoi(ClosedForm::MM12SS_PS, p), 101.0 / 48.0);
  EXPECT_DOUBLE_EQ(aaoi(ClosedForm::MM12SS_FGFS, p), 53.0 / 24.0);
  EXPECT_DOUBLE_EQ(aaoi(ClosedForm::MM11, p), 2.5);
  EXPECT_DOUBLE_EQ(aaoi(ClosedForm::MM11S, p), 2.0);
}

TEST(ClosedForm, TextbookSingleBufferForms) {
  // M/M/1/1: 1/lambda + 2/mu - 1/(lambda+mu); preemptive: 1/lambda + 1/mu.
  for (double l : {0.05, 0.7, 3.0, 40.0})
    for (double m : {0.2, 1.0, 9.0}) {
      const RateParams p(l, m);
      EXPECT_NEAR(aaoi(ClosedForm::MM11, p), 1 / l + 2 / m - 1 / (l + m), 1e-12 * aaoi(ClosedForm::MM11, p));
      EXPECT_NEAR(aaoi(ClosedForm::MM11S, p), 1 / l + 1 / m, 1e-12 * aaoi(ClosedForm::MM11S, p));
    }
}

TEST(ClosedForm, InfiniteBufferForms) {
  EXPECT_NEAR(aaoi(ClosedForm::MM1_FGFS, RateParams(0.5, 1.0)), 3.5, 1e-14);
  EXPECT_NEAR(aaoi(ClosedForm::MM1_FGFS, RateParams(1.0, 2.0)), 1.75, 1e-14);
  EXPECT_NEAR(aaoi(ClosedForm::MM1_PS_LOWER_BOUND, RateParams(0.5, 1.0)), 1.0, 1e-14);
  EXPECT_THROW(aaoi(ClosedForm::MM1_FGFS, RateParams(1.0, 1.0)), std::domain_error);
  EXPECT_THROW(aaoi(ClosedForm::MM1_FGFS, RateParams(2.0, 1.0)), std::domain_error);
  EXPECT_THROW(aaoi(ClosedForm::MM1_PS_LOWER_BOUND, RateParams(1.0, 1.0)), std::domain_error);
}

TEST(ClosedForm, RejectsBadRates) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(RateParams(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(RateParams(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(RateParams(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(RateParams(nan, 1.0), std::invalid_argument);
  EXPECT_THROW(RateParams(1.0, inf), std::invalid_argument);
}

TEST(ClosedForm, ScaleCovariance) {
  // Multiplying both rates by c divides the age by c.
  for (ClosedForm id : kFiniteModels)
    for (double c : {0.01, 0.5, 7.0, 1000.0}) {
      const double base = aaoi(id, RateParams(0.37, 1.9));
      EXPECT_NEAR(aaoi(id, RateParams(0.37 * c, 1.9 * c)), base / c, 1e-12 * base / c) << to_string(id);
    }
}

TEST(ClosedForm, ExactAgreementWithRationalShsSolve) {
  // Dyadic rates are exact doubles, so the SHS system can be solved in exact
  // rational arithmetic and compared with the closed form without rounding.
  const double grid[] = {0.25, 0.5, 1.0, 1.5, 2.75, 6.0};
  for (ClosedForm id : kFiniteModels)
    for (double l : grid)
      for (double m : {0.5, 1.0, 3.25}) {
        const auto model = shs::build_finite_model(id, RateParams(l, m));
        const auto exact = oracle::solve_shs_exact(model);
        EXPECT_EQ(exact.aaoi, oracle::closed_form_exact(id, oracle::Q(l), oracle::Q(m)))
            << to_string(id) << " lambda=" << l << " mu=" << m;
      }
}

TEST(ClosedForm, ReferenceValuesAtUnitRatesAreExact) {
  using oracle::Q;
  EXPECT_EQ(oracle::closed_form_exact(ClosedForm::MM12S_PS, Q(1), Q(1)), Q(53, 24));
  EXPECT_EQ(oracle::closed_form_exact(ClosedForm::MM12SS_PS, Q(1), Q(1)), Q(101, 48));
  EXPECT_EQ(oracle::closed_form_exact(ClosedForm::MM12SS_FGFS, Q(1), Q(1)), Q(53, 24));
}

TEST(ClosedForm, DenominatorDegreeExceedsNumeratorByOne) {
  for (ClosedForm id : kFiniteModels) {
    const auto f = rational_form(id);
    EXPECT_EQ(f.denominator.degree(), f.numerator.degree() + 1) << to_string(id);
  }
  EXPECT_THROW(rational_form(ClosedForm::MM1_FGFS), std::invalid_argument);
}

TEST(ClosedForm, LoadLimits) {
  EXPECT_DOUBLE_EQ(ratio_limit(ClosedForm::MM12_FGFS, ClosedForm::MM12_PS, LoadLimit::Zero), 1.0);
  EXPECT_DOUBLE_EQ(ratio_limit(ClosedForm::MM12_FGFS, ClosedForm::MM12_PS, LoadLimit::Infinity), 1.2);
  EXPECT_DOUBLE_EQ(ratio_limit(ClosedForm::MM12S_FGFS, ClosedForm::MM12S_PS, LoadLimit::Infinity), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(ratio_limit(ClosedForm::MM12_PS, ClosedForm::MM12SS_PS, LoadLimit::Infinity), 2.5);
  EXPECT_DOUBLE_EQ(ratio_limit(ClosedForm::MM12SS_PS, ClosedForm::MM11S, LoadLimit::Infinity), 1.0);
  // Ratio at rho = 1: 8/3 over 5/2.
  EXPECT_NEAR(ratio(ClosedForm::MM12_FGFS, ClosedForm::MM12_PS, RateParams(1.0, 1.0)), 16.0 / 15.0, 1e-15);
}

TEST(ClosedForm, PreemptionOrderingsHoldOnAGrid) {
  for (double rho : {1e-3, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3}) {
    const RateParams p(rho, 1.0);
    EXPECT_GE(aaoi(ClosedForm::MM12_PS, p), aaoi(ClosedForm::MM12S_PS, p));
    EXPECT_GE(aaoi(ClosedForm::MM12S_PS, p), aaoi(ClosedForm::MM12SS_PS, p));
    EXPECT_GE(aaoi(ClosedForm::MM12_FGFS, p), aaoi(ClosedForm::MM12_PS, p));
    EXPECT_GE(aaoi(ClosedForm::MM12SS_PS, p), aaoi(ClosedForm::MM11S, p));
  }
}

TEST(ClosedForm, NamesRoundTrip) {
  for (ClosedForm id : kAllClosedForms) {
    EXPECT_EQ(parse_closed_form(to_string(id)), id);
    EXPECT_FALSE(describe(id).empty());
  }
  EXPECT_EQ(parse_closed_form("mm12ss-ps"), ClosedForm::MM12SS_PS);
  try {
    parse_closed_form("mm13");
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("mm12star2-fgfs"), std::string::npos);
  }
}

TEST(ClosedForm, HomogeneousPolyArithmetic) {
  const HomogeneousPoly a{1.0, 1.0}; // mu + lambda
  const HomogeneousPoly sq = a * a;
  ASSERT_EQ(sq.degree(), 2u);
  EXPECT_DOUBLE_EQ(sq(2.0, 3.0), 25.0);
  EXPECT_EQ(sq.lowest_power(), 0u);
  EXPECT_EQ(sq.highest_power(), 2u);
  const HomogeneousPoly lam_only{0.0, 0.0, 4.0};
  EXPECT_EQ(lam_only.lowest_power(), 2u);
  EXPECT_DOUBLE_EQ(lam_only.lowest_nonzero(), 4.0);
  EXPECT_THROW(HomogeneousPoly({0.0, 0.0}).highest_nonzero(), std::domain_error);
}

TEST(ClosedForm, ConjectureBounds) {
  const auto b = conjecture_bounds(0.5);
  EXPECT_DOUBLE_EQ(b.lower, 0.0);
  EXPECT_DOUBLE_EQ(b.upper, 0.5);
  const auto hi = conjecture_bounds(0.9);
  EXPECT_NEAR(hi.large_rho_lower, 0.64, 1e-12);
  EXPECT_NEAR(hi.large_rho_upper, 0.675 / std::sqrt(0.1), 1e-12);
  EXPECT_TRUE(hi.large_rho_applicable);
  EXPECT_THROW(conjecture_bounds(1.0), std::domain_error);
  EXPECT_THROW(conjecture_bounds(0.0), std::domain_error);
}
