#include "tmu/spacetime.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tmu/error.hpp"

namespace tmu {

using nlohmann::json;

double alpha_star(double c, double k) {
  if (!(c > 0) || !(k > 0)) throw ConfigurationError("c and k must be positive");
  return std::sqrt(2.0 * k / (3.0 * c * c * c * c));
}

namespace {

double require(const ParamMap& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end()) throw ConfigurationError(std::string("missing parameter ") + key);
  if (!std::isfinite(it->second)) throw ConfigurationError(std::string("parameter ") + key + " is not finite");
  return it->second;
}

void only(const ParamMap& p, std::initializer_list<const char*> allowed, std::string_view model) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const char* a : allowed) ok |= k == a;
    if (!ok) throw ConfigurationError("unknown parameter '" + k + "' for " + std::string(model));
  }
}

SpacetimeModel diagonal(std::string name, std::array<std::string, kDim> coords,
                        std::array<const char*, kDim> diag, ParamMap params) {
  SpacetimeModel m;
  m.name = std::move(name);
  m.coords = std::move(coords);
  m.params = std::move(params);
  for (int i = 0; i < kDim; ++i) m.metric[i][i] = parse(diag[i]);
  m.alpha = alpha_star(m.c, m.k);
  m.alpha_is_star = true;
  return m;
}

const std::array<std::string, kDim> kCartesian{"t", "x", "y", "z"};
const std::array<std::string, kDim> kSpherical{"t", "r", "theta", "phi"};

}  // namespace

std::vector<std::string> catalog_names() {
  return {"minkowski", "uniform_field", "schwarzschild", "reissner_nordstrom", "weak_field"};
}

SpacetimeModel catalog(std::string_view name, const ParamMap& params) {
  const double pi = std::numbers::pi;
  if (name == "minkowski") {
    only(params, {}, name);
    auto m = diagonal("minkowski", kCartesian, {"1", "-1", "-1", "-1"}, {});
    m.electrovacuum = true;
    m.sample_box = Box4{{{-1, 1}, {-2, 2}, {-2, 2}, {-2, 2}}};
    return m;
  }
  if (name == "uniform_field") {
    only(params, {"E0"}, name);
    const double E0 = require(params, "E0");
    auto m = diagonal("uniform_field", kCartesian, {"1", "-1", "-1", "-1"}, {{"E0", E0}});
    m.potential[0] = parse("-E0*x");
    m.sample_box = Box4{{{-1, 1}, {-2, 2}, {-2, 2}, {-2, 2}}};
    return m;
  }
  if (name == "schwarzschild") {
    only(params, {"M"}, name);
    const double M = require(params, "M");
    if (!(M > 0)) throw ConfigurationError("schwarzschild needs M > 0");
    auto m = diagonal("schwarzschild", kSpherical,
                      {"1 - 2*M/r", "-1/(1 - 2*M/r)", "-r^2", "-r^2*sin(theta)^2"}, {{"M", M}});
    m.chart_guard = parse("(r - 2*M) + sin(theta) - abs(r - 2*M - sin(theta))");
    m.electrovacuum = true;
    m.sample_box = Box4{{{-1, 1}, {4 * M, 20 * M}, {0.3, pi - 0.3}, {0, 2 * pi}}};
    return m;
  }
  if (name == "reissner_nordstrom") {
    only(params, {"M", "Q"}, name);
    const double M = require(params, "M");
    const double Q = require(params, "Q");
    if (!(M > 0)) throw ConfigurationError("reissner_nordstrom needs M > 0");
    if (!(std::abs(Q) < M)) throw ConfigurationError("reissner_nordstrom needs |Q| < M");
    auto m = diagonal("reissner_nordstrom", kSpherical,
                      {"1 - 2*M/r + Q^2/r^2", "-1/(1 - 2*M/r + Q^2/r^2)", "-r^2", "-r^2*sin(theta)^2"},
                      {{"M", M}, {"Q", Q}});
    m.potential[0] = parse("Q/r");
    m.electrovacuum = true;
    m.chart_guard = parse(
        "(r - (M + sqrt(M^2 - Q^2))) + sin(theta) - abs(r - (M + sqrt(M^2 - Q^2)) - sin(theta))");
    m.sample_box = Box4{{{-1, 1}, {4 * M, 20 * M}, {0.3, pi - 0.3}, {0, 2 * pi}}};
    return m;
  }
  if (name == "weak_field") {
    only(params, {"M"}, name);
    const double M = require(params, "M");
    if (!(M > 0)) throw ConfigurationError("weak_field needs M > 0");
    auto m = diagonal("weak_field", kCartesian,
                      {"1 - 2*M/sqrt(x^2 + y^2 + z^2)", "-(1 + 2*M/sqrt(x^2 + y^2 + z^2))",
                       "-(1 + 2*M/sqrt(x^2 + y^2 + z^2))", "-(1 + 2*M/sqrt(x^2 + y^2 + z^2))"},
                      {{"M", M}});
    m.chart_guard = parse("x^2 + y^2 + z^2 - 4*M^2");
    m.sample_box = Box4{{{-1, 1}, {3 * M, 6 * M}, {3 * M, 6 * M}, {3 * M, 6 * M}}};
    return m;
  }
  throw UsageError("unknown catalog model '" + std::string(name) + "'");
}

SpacetimeModel with_alpha(SpacetimeModel m, double alpha) {
  m.alpha = alpha;
  m.alpha_is_star = false;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

Expr parse_field(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigurationError(where + ": expected an expression string");
  try {
    return parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what(), e.span(), e.expected(), j.get<std::string>());
  }
}

double number_field(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigurationError(where + ": expected a number");
  return j.get<double>();
}

void check_symbols(const Expr& e, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& s : free_symbols(e)) {
    if (!allowed.count(s)) throw ConfigurationError(where + ": unbound symbol '" + s + "'");
  }
}

}  // namespace

SpacetimeModel load_model(std::string_view document) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigurationError("model file must hold a JSON object");
  static const std::set<std::string> keys{"name",      "coords", "params", "metric", "potential",
                                          "alpha",     "c",      "k",      "chart_guard", "electrovacuum"};
  for (const auto& [key, v] : j.items()) {
    if (!keys.count(key)) throw ConfigurationError("unknown key '" + key + "' in model file");
  }
  for (const char* req : {"name", "coords", "metric"}) {
    if (!j.contains(req)) throw ConfigurationError(std::string("model file lacks '") + req + "'");
  }

  SpacetimeModel m;
  if (!j["name"].is_string()) throw ConfigurationError("name: expected a string");
  m.name = j["name"].get<std::string>();

  const json& coords = j["coords"];
  if (!coords.is_array() || coords.size() != kDim) throw ConfigurationError("coords: expected 4 names");
  std::set<std::string> allowed{"pi"};
  for (int i = 0; i < kDim; ++i) {
    if (!coords[i].is_string()) throw ConfigurationError("coords: expected strings");
    m.coords[i] = coords[i].get<std::string>();
    if (!allowed.insert(m.coords[i]).second) {
      throw ConfigurationError("coords: duplicate or reserved name '" + m.coords[i] + "'");
    }
  }

  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigurationError("params: expected an object");
    for (const auto& [key, v] : j["params"].items()) {
      m.params[key] = number_field(v, "params." + key);
      if (!allowed.insert(key).second) {
        throw ConfigurationError("params: name '" + key + "' clashes with a coordinate or pi");
      }
    }
  }

  m.c = j.contains("c") ? number_field(j["c"], "c") : 1.0;
  m.k = j.contains("k") ? number_field(j["k"], "k") : 1.0;
  if (!(m.c > 0) || !(m.k > 0)) throw ConfigurationError("c and k must be positive");

  if (!j.contains("alpha") || (j["alpha"].is_string() && j["alpha"] == "star")) {
    m.alpha = alpha_star(m.c, m.k);
    m.alpha_is_star = true;
  } else if (j["alpha"].is_number()) {
    m.alpha = j["alpha"].get<double>();
    m.alpha_is_star = false;
  } else {
    throw ConfigurationError("alpha: expected a number or \"star\"");
  }

  const json& g = j["metric"];
  if (!g.is_array() || g.size() != kDim) throw ConfigurationError("metric: expected 4 rows");
  for (int i = 0; i < kDim; ++i) {
    if (!g[i].is_array() || g[i].size() != kDim) {
      throw ConfigurationError("metric row " + std::to_string(i) + ": expected 4 entries");
    }
  }
  for (int i = 0; i < kDim; ++i) {
    for (int jj = i; jj < kDim; ++jj) {
      const std::string where = "metric[" + std::to_string(i) + "][" + std::to_string(jj) + "]";
      m.metric[i][jj] = parse_field(g[i][jj], where);
      check_symbols(m.metric[i][jj], allowed, where);
      if (jj != i) {
        const json& lower = g[jj][i];
        if (!lower.is_null() && !(lower.is_string() && lower.get<std::string>().empty())) {
          Expr other = parse_field(lower, "metric[" + std::to_string(jj) + "][" + std::to_string(i) + "]");
          if (print(other) != print(m.metric[i][jj])) {
            throw ConfigurationError("metric is not symmetric: entries [" + std::to_string(i) + "][" +
                                     std::to_string(jj) + "] and [" + std::to_string(jj) + "][" +
                                     std::to_string(i) + "] differ");
          }
        }
        m.metric[jj][i] = m.metric[i][jj];
      }
    }
  }

  if (j.contains("potential")) {
    const json& a = j["potential"];
    if (!a.is_array() || !(a.empty() || a.size() == kDim)) {
      throw ConfigurationError("potential: expected 4 expressions (or an empty list)");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string where = "potential[" + std::to_string(i) + "]";
      m.potential[i] = parse_field(a[i], where);
      check_symbols(m.potential[i], allowed, where);
    }
  }

  if (j.contains("chart_guard") && !j["chart_guard"].is_null()) {
    m.chart_guard = parse_field(j["chart_guard"], "chart_guard");
    check_symbols(*m.chart_guard, allowed, "chart_guard");
  }
  if (j.contains("electrovacuum")) {
    if (!j["electrovacuum"].is_boolean()) throw ConfigurationError("electrovacuum: expected true or false");
    m.electrovacuum = j["electrovacuum"].get<bool>();
  }
  return m;
}

std::string print_model(const SpacetimeModel& m) {
  json j;
  j["name"] = m.name;
  j["coords"] = m.coords;
  json params = json::object();
  for (const auto& [k, v] : m.params) params[k] = v;
  j["params"] = params;
  json g = json::array();
  for (int i = 0; i < kDim; ++i) {
    json row = json::array();
    for (int jj = 0; jj < kDim; ++jj) row.push_back(print(m.metric[i][jj]));
    g.push_back(row);
  }
  j["metric"] = g;
  json a = json::array();
  for (int i = 0; i < kDim; ++i) a.push_back(print(m.potential[i]));
  j["potential"] = a;
  if (m.alpha_is_star) {
    j["alpha"] = "star";
  } else {
    j["alpha"] = m.alpha;
  }
  j["c"] = m.c;
  j["k"] = m.k;
  if (m.chart_guard) j["chart_guard"] = print(*m.chart_guard);
  j["electrovacuum"] = m.electrovacuum;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

namespace {

std::map<std::string, double, std::less<>> double_env(const SpacetimeModel& m, const Point4& x) {
  std::map<std::string, double, std::less<>> env(m.params.begin(), m.params.end());
  for (int i = 0; i < kDim; ++i) env[m.coords[i]] = x[i];
  return env;
}

JetEnv jet_env(const SpacetimeModel& m, const Point4& x, const JetLayout& L) {
  if (L.nvars() < kDim) throw UsageError("metric jets need a layout with at least 4 variables");
  JetEnv env;
  for (const auto& [k, v] : m.params) env.emplace(k, Jet(L, v));
  for (int i = 0; i < kDim; ++i) env.insert_or_assign(m.coords[i], Jet::variable(L, i, x[i]));
  return env;
}

}  // namespace

bool in_chart(const SpacetimeModel& m, const Point4& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  if (!m.chart_guard) return true;
  try {
    return evaluate(*m.chart_guard, double_env(m, x)) > 0.0;
  } catch (const SingularEvaluation&) {
    return false;
  }
}

void check_chart(const SpacetimeModel& m, const Point4& x) {
  if (!in_chart(m, x)) {
    std::ostringstream os;
    os.precision(17);
    os << "point (" << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3]
       << ") is outside the chart of " << m.name;
    double gv = 0.0;
    if (m.chart_guard) {
      try {
        gv = evaluate(*m.chart_guard, double_env(m, x));
      } catch (const Error&) {
      }
    }
    throw ChartViolation(os.str(), gv);
  }
}

void check_signature(const Mat4<double>& g) {
  const double det = determinant(g);
  if (!(det < 0.0)) {
    throw SingularEvaluation("metric determinant " + std::to_string(det) + " is not negative", det);
  }
  auto ev = symmetric_eigenvalues(g);
  if (!(ev[0] < 0 && ev[1] < 0 && ev[2] < 0 && ev[3] > 0)) {
    throw SingularEvaluation("metric signature is not (+,-,-,-)", ev[3]);
  }
}

Mat4<Jet> metric_jet(const SpacetimeModel& m, const Point4& x, const JetLayout& L) {
  check_chart(m, x);
  const JetEnv env = jet_env(m, x, L);
  Mat4<Jet> g;
  for (int i = 0; i < kDim; ++i) {
    for (int j = i; j < kDim; ++j) {
      g[i][j] = evaluate(m.metric[i][j], env);
      if (j != i) g[j][i] = g[i][j];
    }
  }
  check_signature(values(g));
  return g;
}

Vec4<Jet> potential_jet(const SpacetimeModel& m, const Point4& x, const JetLayout& L) {
  check_chart(m, x);
  const JetEnv env = jet_env(m, x, L);
  Vec4<Jet> a;
  for (int i = 0; i < kDim; ++i) a[i] = evaluate(m.potential[i], env);
  return a;
}

Mat4<Jet> metric_jet(const SpacetimeModel& m, const Point4& x, int order) {
  return metric_jet(m, x, JetLayout::get(order, kDim));
}

Vec4<Jet> potential_jet(const SpacetimeModel& m, const Point4& x, int order) {
  return potential_jet(m, x, JetLayout::get(order, kDim));
}

Mat4<double> metric_value(const SpacetimeModel& m, const Point4& x) {
  check_chart(m, x);
  const auto env = double_env(m, x);
  Mat4<double> g{};
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) g[i][j] = g[j][i] = evaluate(m.metric[i][j], env);
  check_signature(g);
  return g;
}

Vec4<double> potential_value(const SpacetimeModel& m, const Point4& x) {
  check_chart(m, x);
  const auto env = double_env(m, x);
  Vec4<double> a{};
  for (int i = 0; i < kDim; ++i) a[i] = evaluate(m.potential[i], env);
  return a;
}

}  // namespace tmu
