#include <cmath>

#include <Eigen/Dense>

#include "dtapb/regression.hpp"
#include "support.hpp"

using namespace dtapb;

namespace {

struct Oracle {
  double b0, b1, se_b0, se_b1;
};

// Normal equations (X'WX) b = X'Wy solved directly, covariance s^2 (X'WX)^-1.
Oracle normal_equations(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& w) {
  const auto k = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd X(k, 2);
  Eigen::VectorXd Y(k);
  Eigen::VectorXd W(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    X(i, 0) = 1;
    X(i, 1) = x[i];
    Y(i) = y[i];
    W(i) = w[i];
  }
  const Eigen::Matrix2d xtwx = X.transpose() * W.asDiagonal() * X;
  const Eigen::Vector2d b = xtwx.ldlt().solve(X.transpose() * W.asDiagonal() * Y);
  const Eigen::VectorXd r = Y - X * b;
  const double s2 = r.dot(W.asDiagonal() * r) / static_cast<double>(k - 2);
  const Eigen::Matrix2d cov = s2 * xtwx.inverse();
  return {b(0), b(1), std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1))};
}

void expect_significant_digits(double got, double want, double digits) {
  EXPECT_LE(std::abs(got - want), std::pow(10.0, -digits) * std::max(1.0, std::abs(want)))
      << got << " vs " << want;
}

}  // namespace

TEST(WeightedLeastSquares, AgreesWithNormalEquationsOnRandomInputs) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5, 5), wd(0.1, 10);
  std::uniform_int_distribution<int> kd(3, 40);
  for (int rep = 0; rep < 500; ++rep) {
    const int k = kd(rng);
    std::vector<double> x(k), y(k), w(k);
    for (int i = 0; i < k; ++i) {
      x[i] = u(rng);
      y[i] = 0.7 - 1.3 * x[i] + u(rng);
      w[i] = wd(rng);
    }
    const auto fit = weighted_least_squares(x, y, w);
    const auto o = normal_equations(x, y, w);
    expect_significant_digits(fit.b0, o.b0, 10);
    expect_significant_digits(fit.b1, o.b1, 10);
    expect_significant_digits(fit.se_b0, o.se_b0, 10);
    expect_significant_digits(fit.se_b1, o.se_b1, 10);
    EXPECT_EQ(fit.df, k - 2);
  }
}

TEST(WeightedLeastSquares, ThreePointClosedForm) {
  // Precision-axis regression for (t, se) = (1,1), (1,0.5), (1,0.25): y = 1/se, x = 1/se.
  const std::vector<double> x{1, 2, 4}, y{1, 2, 4}, w{1, 1, 1};
  const auto fit = weighted_least_squares(x, y, w);
  EXPECT_NEAR(fit.b0, 0.0, 1e-12);
  EXPECT_NEAR(fit.b1, 1.0, 1e-12);
  EXPECT_TRUE(fit.exact_fit);
}

TEST(WeightedLeastSquares, ConstantPredictorIsSingular) {
  const std::vector<double> x{2, 2, 2, 2}, y{1, 2, 3, 4}, w{1, 1, 1, 1};
  EXPECT_DTAPB_ERROR(weighted_least_squares(x, y, w), ErrorCode::SingularDesign);
}

TEST(WeightedLeastSquares, InputErrors) {
  const std::vector<double> x{1, 2, 3}, y{1, 2}, w{1, 1, 1};
  EXPECT_DTAPB_ERROR(weighted_least_squares(x, y, w), ErrorCode::LengthMismatch);
  const std::vector<double> x2{1, 2}, y2{1, 2}, w2{1, 1};
  EXPECT_DTAPB_ERROR(weighted_least_squares(x2, y2, w2), ErrorCode::TooFewStudies);
}

TEST(Standardized, ExactFitHandling) {
  EXPECT_DOUBLE_EQ(standardized(2.0, 0.5, false, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(standardized(1e-14, 0.0, true, 1.0), 0.0);
  EXPECT_TRUE(std::isinf(standardized(0.3, 0.0, true, 1.0)));
  EXPECT_GT(standardized(0.3, 0.0, true, 1.0), 0);
  EXPECT_LT(standardized(-0.3, 0.0, true, 1.0), 0);
}
