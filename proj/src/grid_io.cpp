#include "dtapb/grid_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dtapb {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, "grid file: " + what);
}

const json& require_array(const json& doc, const char* field) {
  if (!doc.contains(field) || !doc.at(field).is_array() || doc.at(field).empty()) {
    fail(std::string("'") + field + "' must be a non-empty array");
  }
  return doc.at(field);
}

std::array<double, 3> parse_sigma(const json& s) {
  if (!s.is_array()) fail("sigma entries must be arrays");
  if (s.size() == 3 && s[0].is_number()) return {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
  if (s.size() == 2 && s[0].is_array() && s[1].is_array() && s[0].size() == 2 && s[1].size() == 2) {
    const double ab = s[0][1].get<double>();
    if (ab != s[1][0].get<double>()) fail("sigma matrix must be symmetric");
    return {s[0][0].get<double>(), ab, s[1][1].get<double>()};
  }
  fail("sigma entries must be [s_a2, s_ab, s_b2] or a 2x2 matrix");
}

BiasSpec parse_bias(const json& b) {
  if (!b.is_object() || !b.contains("mechanism")) fail("bias entries need a 'mechanism'");
  const auto mech = b.at("mechanism").get<std::string>();
  if (mech == "none") return BiasSpec::none();
  if (mech == "selection") {
    if (!b.contains("fraction")) fail("selection bias needs 'fraction'");
    auto spec = BiasSpec::selection(b.at("fraction").get<double>());
    spec.select_on_true_youden = b.value("true_youden", false);
    return spec;
  }
  if (mech == "mixture") {
    if (!b.contains("eta") || !b.at("eta").is_array() || b.at("eta").size() != 2) {
      fail("mixture bias needs 'eta': [eta_a, eta_b]");
    }
    auto spec = BiasSpec::mixture(b.at("eta")[0].get<double>(), b.at("eta")[1].get<double>());
    if (b.contains("fraction")) spec.mixture_fraction = b.at("fraction").get<double>();
    return spec;
  }
  fail("unknown bias mechanism '" + mech + "'");
}

}  // namespace

std::vector<SimCondition> parse_grid_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(e.what());
  }
  if (!doc.is_object()) fail("top level must be an object");

  std::vector<SimCondition> grid;
  try {
    const int n_min = doc.value("n_min", 50);
    const int n_max = doc.value("n_max", 1000);
    std::vector<BiasSpec> biases;
    for (const auto& b : require_array(doc, "bias")) biases.push_back(parse_bias(b));
    for (const auto& mu : require_array(doc, "mu")) {
      if (!mu.is_array() || mu.size() != 2) fail("mu entries must be [mu_a, mu_b]");
      for (const auto& sj : require_array(doc, "sigma")) {
        const auto sigma = parse_sigma(sj);
        for (const auto& k : require_array(doc, "k")) {
          for (const auto& pi : require_array(doc, "pi")) {
            for (const auto& bias : biases) {
              SimCondition c;
              c.id = grid.size();
              c.params = {{mu[0].get<double>(), mu[1].get<double>()}, sigma[0], sigma[1], sigma[2]};
              c.k = k.get<int>();
              c.pi = pi.get<double>();
              c.n_min = n_min;
              c.n_max = n_max;
              c.bias = bias;
              grid.push_back(c);
            }
          }
        }
      }
    }
  } catch (const json::exception& e) {
    fail(e.what());
  }
  for (const auto& c : grid) {
    try {
      validate_condition(c);
    } catch (const Error& e) {
      fail(std::string("condition ") + std::to_string(c.id) + ": " + e.what());
    }
  }
  return grid;
}

std::vector<SimCondition> load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open grid file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grid_json(ss.str());
}

std::vector<SimCondition> resolve_grid(const std::string& source) {
  if (source == "default") return default_grid();
  return load_grid_file(source);
}

}  // namespace dtapb
