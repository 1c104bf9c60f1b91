#include <cmath>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "dtapb/asymmetry.hpp"
#include "dtapb/pooling.hpp"
#include "support.hpp"

using namespace dtapb;
using dtapb::testing::est;
using dtapb::testing::random_estimates;

namespace {

struct Coef {
  double b0, b1, se_b0, se_b1;
};

Coef ols_oracle(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  const auto k = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd X(k, 2);
  Eigen::VectorXd Y(k), W(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X.row(i) << 1.0, x[i];
    Y(i) = y[i];
    W(i) = w[i];
  }
  const Eigen::Matrix2d a = X.transpose() * W.asDiagonal() * X;
  const Eigen::Vector2d b = a.inverse() * (X.transpose() * W.asDiagonal() * Y);
  const Eigen::VectorXd r = Y - X * b;
  const Eigen::Matrix2d cov = r.dot(W.asDiagonal() * r) / double(k - 2) * a.inverse();
  return {b(0), b(1), std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1))};
}

double t_upper(double t, double df) {
  return boost::math::cdf(boost::math::complement(boost::math::students_t(df), t));
}

}  // namespace

// ---------------------------------------------------------------- Egger

TEST(Egger, ConstantEffectIsLineThroughOrigin) {
  const std::vector<EffectEstimate> e{est(1, 1), est(1, 0.5), est(1, 0.25)};
  const auto fit = egger_fit(e, {});
  const auto o = ols_oracle({1, 2, 4}, {1, 2, 4}, {1, 1, 1});
  EXPECT_NEAR(fit.b0, o.b0, 1e-12);
  EXPECT_NEAR(fit.b1, o.b1, 1e-12);
  EXPECT_NEAR(fit.b0, 0.0, 1e-12);
  const auto r = egger_test(e, {}, Sidedness::OneSided, 0.1);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.5);
  EXPECT_FALSE(r.reject);

  std::vector<EffectEstimate> many;
  for (double se : {0.1, 0.2, 0.35, 0.5, 0.8, 1.3}) many.push_back(est(2.5, se));
  EXPECT_DOUBLE_EQ(egger_test(many, {}, Sidedness::OneSided, 0.1).p_value, 0.5);
}

TEST(Egger, IdenticalStandardErrorsAreSingular) {
  const std::vector<EffectEstimate> e{est(1, 0.3), est(2, 0.3), est(0.5, 0.3), est(1.2, 0.3)};
  EXPECT_DTAPB_ERROR(egger_test(e, {}, Sidedness::OneSided, 0.1), ErrorCode::SingularDesign);
}

TEST(Egger, TooFewStudies) {
  const std::vector<EffectEstimate> e{est(1, 0.3), est(2, 0.5)};
  EXPECT_DTAPB_ERROR(egger_test(e, {}, Sidedness::OneSided, 0.1), ErrorCode::TooFewStudies);
}

TEST(Egger, AllWeightingsMatchOracle) {
  std::mt19937_64 rng(30);
  for (int rep = 0; rep < 40; ++rep) {
    const auto e = random_estimates(rng, 15, 0.4);
    const double tau2 = pool_random_effects(e).tau2;
    for (auto axis : {EggerAxis::SE, EggerAxis::N}) {
      for (auto weighting : {EggerWeighting::Unweighted, EggerWeighting::InvVarianceFixed,
                             EggerWeighting::InvVarianceRandom}) {
        std::vector<double> x, y, w;
        for (const auto& s : e) {
          y.push_back(s.value / s.se);
          x.push_back(axis == EggerAxis::SE ? 1 / s.se : s.n);
          w.push_back(weighting == EggerWeighting::Unweighted       ? 1.0
                      : weighting == EggerWeighting::InvVarianceFixed ? 1 / s.variance()
                                                                      : 1 / (s.variance() + tau2));
        }
        const auto o = ols_oracle(x, y, w);
        const auto r = egger_test(e, {axis, weighting}, Sidedness::OneSided, 0.1);
        EXPECT_NEAR(r.statistic, o.b0 / o.se_b0, 1e-8);
        EXPECT_NEAR(r.p_value, t_upper(o.b0 / o.se_b0, 13), 1e-10);
        const auto two = egger_test(e, {axis, weighting}, Sidedness::TwoSided, 0.1);
        EXPECT_NEAR(two.p_value, 2 * t_upper(std::abs(o.b0 / o.se_b0), 13), 1e-10);
      }
    }
  }
}

TEST(Egger, ScaleInvariance) {
  std::mt19937_64 rng(31);
  const auto e = random_estimates(rng, 20, 0.3);
  auto scaled = e;
  for (auto& s : scaled) {
    s.value *= 3.7;
    s.se *= 3.7;
  }
  EXPECT_NEAR(egger_test(e, {}, Sidedness::OneSided, 0.1).statistic,
              egger_test(scaled, {}, Sidedness::OneSided, 0.1).statistic, 1e-9);
}

// A constant shift moves only the slope of the precision-axis regression.
TEST(Egger, InterceptInvariantToLocationShiftOnPrecisionAxis) {
  std::mt19937_64 rng(32);
  const auto e = random_estimates(rng, 20, 0.3);
  auto shifted = e;
  for (auto& s : shifted) s.value += 1.9;
  const auto a = egger_fit(e, {});
  const auto b = egger_fit(shifted, {});
  EXPECT_NEAR(a.b0, b.b0, 1e-9);
  EXPECT_NEAR(a.se_b0, b.se_b0, 1e-9);
  EXPECT_NEAR(b.b1 - a.b1, 1.9, 1e-9);
}

TEST(Egger, DetectsSmallStudyInflation) {
  std::vector<EffectEstimate> e;
  for (int i = 1; i <= 12; ++i) {
    const double se = 0.08 * i;
    e.push_back(est(1.0 + 2.0 * se + 0.01 * ((i * 7) % 3 - 1), se));
  }
  const auto r = egger_test(e, {}, Sidedness::OneSided, 0.1);
  EXPECT_GT(r.statistic, 0);
  EXPECT_TRUE(r.reject);
  EXPECT_EQ(r.test_id, "E(lnDOR,SE)");
}

// ------------------------------------------------------------- Macaskill

TEST(Macaskill, ConstantEffectNeverRejects) {
  const std::vector<EffectEstimate> e{est(1.2, 0.3, 60), est(1.2, 0.2, 300), est(1.2, 0.1, 900),
                                      est(1.2, 0.25, 120)};
  for (auto p : {MacaskillPredictor::N, MacaskillPredictor::InvSqrtEss, MacaskillPredictor::InvN}) {
    const auto fit = macaskill_fit(e, {p, MacaskillWeighting::InvVarianceFixed});
    EXPECT_NEAR(fit.b1, 0.0, 1e-12);
    const auto r = macaskill_test(e, {p, MacaskillWeighting::InvVarianceFixed}, Sidedness::OneSided, 0.1);
    EXPECT_GE(r.p_value, 0.5);
    EXPECT_FALSE(r.reject);
  }
}

TEST(Macaskill, DirectionBySmallStudyInflation) {
  const std::vector<EffectEstimate> e{est(2.0, 0.3, 50), est(1.5, 0.3, 200), est(1.0, 0.3, 800)};
  const auto on_n = macaskill_fit(e, {MacaskillPredictor::N, MacaskillWeighting::InvVarianceFixed});
  const auto on_inv = macaskill_fit(e, {MacaskillPredictor::InvN, MacaskillWeighting::InvVarianceFixed});
  EXPECT_LT(on_n.b1, 0);
  EXPECT_GT(on_inv.b1, 0);
  const auto o = ols_oracle({50, 200, 800}, {2.0, 1.5, 1.0}, {1, 1, 1});
  EXPECT_NEAR(on_n.b1, o.b1, 1e-12);
  const auto r = macaskill_test(e, {MacaskillPredictor::N, MacaskillWeighting::InvVarianceFixed},
                                Sidedness::OneSided, 0.1);
  EXPECT_NEAR(r.p_value, 1 - t_upper(o.b1 / o.se_b1, 1), 1e-10);
  const auto oi = ols_oracle({1.0 / 50, 1.0 / 200, 1.0 / 800}, {2.0, 1.5, 1.0}, {1, 1, 1});
  const auto ri = macaskill_test(e, {MacaskillPredictor::InvN, MacaskillWeighting::InvVarianceFixed},
                                 Sidedness::OneSided, 0.1);
  EXPECT_NEAR(ri.p_value, t_upper(oi.b1 / oi.se_b1, 1), 1e-10);
}

TEST(Macaskill, WeightingsMatchOracle) {
  std::mt19937_64 rng(40);
  for (int rep = 0; rep < 30; ++rep) {
    auto e = random_estimates(rng, 12, 0.8);
    for (auto& s : e) {
      s.m1 = std::round(s.n * 0.4);
      s.m2 = s.n - s.m1;
    }
    for (auto p : {MacaskillPredictor::N, MacaskillPredictor::InvSqrtEss, MacaskillPredictor::InvN}) {
      for (auto wt : {MacaskillWeighting::InvVarianceFixed, MacaskillWeighting::Ess, MacaskillWeighting::Peters}) {
        std::vector<double> x, y, w;
        for (const auto& s : e) {
          y.push_back(s.value);
          x.push_back(p == MacaskillPredictor::N ? s.n : p == MacaskillPredictor::InvN ? 1 / s.n : 1 / std::sqrt(s.ess));
          w.push_back(wt == MacaskillWeighting::InvVarianceFixed ? 1 / s.variance()
                      : wt == MacaskillWeighting::Ess            ? s.ess
                                                                 : s.m1 * s.m2 / s.n);
        }
        const auto o = ols_oracle(x, y, w);
        const auto r = macaskill_test(e, {p, wt}, Sidedness::TwoSided, 0.1);
        EXPECT_NEAR(r.statistic, o.b1 / o.se_b1, 1e-7);
        EXPECT_NEAR(r.p_value, 2 * t_upper(std::abs(o.b1 / o.se_b1), 10), 1e-9);
      }
    }
  }
}

// ----------------------------------------------------------------- Begg

TEST(Begg, StandardizationUsesVarianceOfCenteredValue) {
  const std::vector<EffectEstimate> e{est(1, 1), est(3, std::sqrt(0.5)), est(2, std::sqrt(0.25))};
  const double w = 1 + 2 + 4;
  const double mean = (1 * 1 + 3 * 2 + 2 * 4) / w;
  const auto z = begg_standardized(e, BeggStandardization::CenteredVariance);
  EXPECT_NEAR(z[0], (1 - mean) / std::sqrt(1 - 1 / w), 1e-12);
  EXPECT_NEAR(z[1], (3 - mean) / std::sqrt(0.5 - 1 / w), 1e-12);
  const auto plain = begg_standardized(e, BeggStandardization::PlainSE);
  EXPECT_NEAR(plain[2], (2 - mean) / 0.5, 1e-12);
}

TEST(Begg, NoAssociationWhenDeviationsAreConstant) {
  const std::vector<EffectEstimate> e{est(1, 0.2), est(1, 0.4), est(1, 0.6), est(1, 0.9)};
  const auto r = begg_test(e, {}, Sidedness::OneSided, 0.1);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.5);
}

TEST(Begg, PerfectConcordance) {
  std::vector<EffectEstimate> e;
  for (int i = 1; i <= 6; ++i) e.push_back(est(10.0 * i, 0.1 * i));
  const auto r = begg_test(e, {}, Sidedness::OneSided, 0.1);
  EXPECT_DOUBLE_EQ(r.statistic, 1.0);
  EXPECT_NEAR(r.p_value, 1.0 / 720.0, 1e-15);  // exhaustive: only the identity permutation
  EXPECT_TRUE(r.reject);

  for (int i = 7; i <= 10; ++i) e.push_back(est(10.0 * i, 0.1 * i));
  const auto big = begg_test(e, {}, Sidedness::OneSided, 0.1);
  EXPECT_DOUBLE_EQ(big.statistic, 1.0);
  const double var = 10.0 * 9 * 25 / 18;
  EXPECT_NEAR(big.p_value, 0.5 * std::erfc(44 / std::sqrt(var) / std::sqrt(2.0)), 1e-12);
}

TEST(Begg, AllTiedDispersion) {
  const std::vector<EffectEstimate> e{est(1, 0.3), est(2, 0.3), est(0.4, 0.3)};
  EXPECT_DTAPB_ERROR(begg_test(e, {}, Sidedness::OneSided, 0.1), ErrorCode::AllTied);
  const std::vector<EffectEstimate> same_n{est(1, 0.3, 100), est(2, 0.4, 100), est(0.4, 0.5, 100)};
  EXPECT_DTAPB_ERROR(begg_test(same_n, {BeggDispersion::InvN}, Sidedness::OneSided, 0.1), ErrorCode::AllTied);
}

TEST(Begg, DispersionValues) {
  const std::vector<EffectEstimate> e{est(1, 0.5, 200, 150)};
  EXPECT_DOUBLE_EQ(begg_dispersion(e, BeggDispersion::Variance)[0], 0.25);
  EXPECT_DOUBLE_EQ(begg_dispersion(e, BeggDispersion::InvN)[0], 1.0 / 200);
  EXPECT_DOUBLE_EQ(begg_dispersion(e, BeggDispersion::InvEss)[0], 1.0 / 150);
}

TEST(Begg, LocationAndScaleInvariance) {
  std::mt19937_64 rng(50);
  for (int rep = 0; rep < 20; ++rep) {
    const auto e = random_estimates(rng, 18, 0.0);
    auto moved = e;
    for (auto& s : moved) s.value += 4.2;
    auto scaled = e;
    for (auto& s : scaled) {
      s.value *= 0.3;
      s.se *= 0.3;
    }
    const double tau = begg_test(e, {}, Sidedness::OneSided, 0.1).statistic;
    EXPECT_NEAR(begg_test(moved, {}, Sidedness::OneSided, 0.1).statistic, tau, 1e-12);
    EXPECT_NEAR(begg_test(scaled, {}, Sidedness::OneSided, 0.1).statistic, tau, 1e-12);
  }
}

TEST(Begg, OneSidedDirectionFollowsSmallStudies) {
  // Small studies (large variance, large 1/N) carry the larger effects.
  std::vector<EffectEstimate> e;
  for (int i = 0; i < 15; ++i) {
    const double n = 1000 - 60 * i;
    const double se = 2 / std::sqrt(n);
    e.push_back(est(1 + 0.04 * i + 0.02 * ((i * 5) % 3), se, n));
  }
  for (auto d : {BeggDispersion::Variance, BeggDispersion::InvN, BeggDispersion::InvEss}) {
    EXPECT_EQ(begg_alternative(d), 1);
    const auto r = begg_test(e, {d}, Sidedness::OneSided, 0.1);
    EXPECT_GT(r.statistic, 0);
    EXPECT_TRUE(r.reject);
  }
}

// ------------------------------------------------- null calibration (synthetic)

// t_i ~ N(0, se_i^2) with se_i uniform on [0.1, 1], k = 30, 10 000 replicates.
TEST(NullCalibration, SyntheticEstimates) {
  std::mt19937_64 rng(2024);
  constexpr int reps = 10000;
  int egger = 0, begg = 0, mac = 0;
  for (int r = 0; r < reps; ++r) {
    const auto e = random_estimates(rng, 30, 0.0);
    egger += egger_test(e, {}, Sidedness::OneSided, 0.1).reject;
    begg += begg_test(e, {}, Sidedness::OneSided, 0.1).reject;
    mac += macaskill_test(e, {}, Sidedness::OneSided, 0.1).reject;
  }
  EXPECT_GE(begg / double(reps), 0.07);
  EXPECT_LE(begg / double(reps), 0.13);
  EXPECT_GE(egger / double(reps), 0.06);
  EXPECT_LE(egger / double(reps), 0.14);
  EXPECT_GE(mac / double(reps), 0.06);
  EXPECT_LE(mac / double(reps), 0.14);
}

// ----------------------------------------------------------------- funnel

TEST(Funnel, AxisCoordinates) {
  const std::vector<EffectEstimate> e{est(1.2, 0.5, 100, 80)};
  EXPECT_DOUBLE_EQ(funnel_points(e, PrecisionAxis::SE)[0].axis_value, 2.0);
  EXPECT_DOUBLE_EQ(funnel_points(e, PrecisionAxis::N)[0].axis_value, 100.0);
  EXPECT_DOUBLE_EQ(funnel_points(e, PrecisionAxis::ESS)[0].axis_value, 80.0);
  EXPECT_DOUBLE_EQ(funnel_points(e, PrecisionAxis::InvN)[0].axis_value, 0.01);
  EXPECT_DOUBLE_EQ(funnel_points(e, PrecisionAxis::InvN)[0].effect, 1.2);
}
