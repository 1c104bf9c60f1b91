#include "dtapb/grid_io.hpp"
#include "support.hpp"

using namespace dtapb;

namespace {

constexpr const char* kSmall = R"({
  "mu": [[0, 0], [2, -2]],
  "sigma": [[0, 0, 0], [[1, 0.5], [0.5, 1]]],
  "k": [10],
  "pi": [0.5, 0.2],
  "bias": [{"mechanism": "none"},
           {"mechanism": "selection", "fraction": 0.4, "true_youden": true},
           {"mechanism": "mixture", "eta": [1.25, -1.25], "fraction": 0.5}],
  "n_min": 20, "n_max": 200
})";

}  // namespace

TEST(GridIo, CartesianProduct) {
  const auto grid = parse_grid_json(kSmall);
  ASSERT_EQ(grid.size(), 2u * 2 * 1 * 2 * 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(grid[i].id, i);
    EXPECT_EQ(grid[i].n_min, 20);
    EXPECT_EQ(grid[i].n_max, 200);
  }
  // bias varies fastest, mu slowest
  EXPECT_EQ(grid[1].bias.mechanism, BiasMechanism::Selection);
  EXPECT_TRUE(grid[1].bias.select_on_true_youden);
  EXPECT_DOUBLE_EQ(grid[2].bias.mixture_fraction, 0.5);
  EXPECT_DOUBLE_EQ(grid[3].pi, 0.2);
  EXPECT_EQ(grid[12].params.mu[0], 2.0);
}

TEST(GridIo, MatrixSigmaForm) {
  const auto grid = parse_grid_json(kSmall);
  const auto& p = grid[6].params;
  EXPECT_DOUBLE_EQ(p.sigma_a2, 1.0);
  EXPECT_DOUBLE_EQ(p.sigma_ab, 0.5);
  EXPECT_DOUBLE_EQ(p.sigma_b2, 1.0);
  EXPECT_TRUE(grid[0].params.is_zero_covariance());
}

TEST(GridIo, MalformedDocuments) {
  const char* bad[] = {
      "not json",
      "[]",
      R"({"sigma": [[0,0,0]], "k": [10], "pi": [0.5], "bias": [{"mechanism": "none"}]})",
      R"({"mu": [[0,0]], "sigma": [[0,0,0]], "k": [10], "pi": [0.5], "bias": [{"mechanism": "funnel"}]})",
      R"({"mu": [[0,0]], "sigma": [[[1,0.5],[0.4,1]]], "k": [10], "pi": [0.5], "bias": [{"mechanism": "none"}]})",
      R"({"mu": [[0,0]], "sigma": [[0,0,0]], "k": ["ten"], "pi": [0.5], "bias": [{"mechanism": "none"}]})",
      R"({"mu": [[0,0]], "sigma": [[0,0,0]], "k": [10], "pi": [0.5], "bias": [{"mechanism": "selection"}]})",
      R"({"mu": [[0,0]], "sigma": [[0,0,0]], "k": [10], "pi": [1.5], "bias": [{"mechanism": "none"}]})",
      R"({"mu": [[0]], "sigma": [[0,0,0]], "k": [10], "pi": [0.5], "bias": [{"mechanism": "none"}]})",
  };
  for (const char* doc : bad) EXPECT_DTAPB_ERROR(parse_grid_json(doc), ErrorCode::ParseError);
}

TEST(GridIo, FullDesignMatchesDefaultGrid) {
  const auto grid = parse_grid_json(R"({
    "mu": [[0, 0], [1, -1], [2, -2], [2, -1]],
    "sigma": [[0, 0, 0], [0.5, 0.3, 0.5], [1, 0.5, 1]],
    "k": [10, 30],
    "pi": [0.5, 0.2],
    "bias": [{"mechanism": "none"},
             {"mechanism": "selection", "fraction": 0.2},
             {"mechanism": "selection", "fraction": 0.4},
             {"mechanism": "mixture", "eta": [0.75, -0.75]},
             {"mechanism": "mixture", "eta": [1.25, -1.25]}]
  })");
  EXPECT_EQ(grid, default_grid());
}

TEST(GridIo, ResolveDefaultAndMissingFile) {
  EXPECT_EQ(resolve_grid("default").size(), 240u);
  EXPECT_DTAPB_ERROR(resolve_grid("/nonexistent/grid.json"), ErrorCode::ParseError);
}
