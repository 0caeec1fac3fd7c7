#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tmu/dynamics.hpp"
#include "tmu/error.hpp"
#include "tmu/tensor_io.hpp"
#include "tmu/tm_metric.hpp"
#include "tmu/verify.hpp"

namespace tmu::cli {

namespace {

using ojson = nlohmann::ordered_json;

double to_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Point4 to_vec4(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != kDim) throw UsageError(what + ": expected 4 comma-separated numbers");
  Point4 p{};
  for (int i = 0; i < kDim; ++i) p[i] = to_number(parts[i], what);
  return p;
}

Box4 to_box(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != kDim) throw UsageError("--box: expected 4 comma-separated ranges lo:hi");
  Box4 b{};
  for (int i = 0; i < kDim; ++i) {
    const auto lh = split(parts[i], ':');
    if (lh.size() != 2) throw UsageError("--box: range '" + parts[i] + "' is not lo:hi");
    b[i] = {to_number(lh[0], "--box"), to_number(lh[1], "--box")};
    if (!(b[i].first < b[i].second)) throw UsageError("--box: empty range '" + parts[i] + "'");
  }
  return b;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ModelArgs {
  std::string catalog;
  std::string file;
  std::vector<std::string> params;
  std::string alpha;
  std::string format;
};

void add_model_options(CLI::App* sub, ModelArgs& a) {
  auto* c = sub->add_option("--catalog", a.catalog, "catalog model name");
  auto* f = sub->add_option("--model", a.file, "model JSON file");
  c->excludes(f);
  sub->add_option("--param", a.params, "model parameter K=V (repeatable)");
  sub->add_option("--alpha", a.alpha, "coupling: a number or 'star'");
  sub->add_option("--format", a.format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

SpacetimeModel build_model(const ModelArgs& a) {
  if (a.catalog.empty() == a.file.empty()) throw UsageError("give exactly one of --catalog or --model");
  ParamMap params;
  for (const std::string& kv : a.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects K=V, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    if (params.count(key)) throw UsageError("--param " + key + " given twice");
    params[key] = to_number(kv.substr(eq + 1), "--param " + key);
  }
  SpacetimeModel m;
  if (!a.catalog.empty()) {
    m = catalog(a.catalog, params);
  } else {
    std::ifstream in(a.file);
    if (!in) throw ConfigurationError("cannot open model file '" + a.file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    m = load_model(ss.str());
    for (const auto& [k, v] : params) {
      auto it = m.params.find(k);
      if (it == m.params.end()) throw ConfigurationError("model has no parameter '" + k + "'");
      it->second = v;
    }
  }
  if (!a.alpha.empty()) {
    if (a.alpha == "star") {
      m.alpha = alpha_star(m.c, m.k);
      m.alpha_is_star = true;
    } else {
      m = with_alpha(m, to_number(a.alpha, "--alpha"));
    }
  }
  return m;
}

bool want_csv(const ModelArgs& a, bool csv_default) {
  return a.format.empty() ? csv_default : a.format == "csv";
}

// ---- subcommands ----------------------------------------------------------

std::vector<TensorValue> base_tensors(const SpacetimeModel& m, const Point4& x) {
  using V = Variance;
  const V u = V::kUpper, l = V::kLower;
  std::vector<TensorValue> t;
  const Mat4<double> g = metric_value(m, x);
  t.push_back(TensorValue::from("metric", g, {l, l}, x, std::nullopt, {{0, 1, false}}));
  t.push_back(TensorValue::from("inverse_metric", inverse(g), {u, u}, x, std::nullopt, {{0, 1, false}}));
  t.push_back(TensorValue::from("christoffel", christoffel(m, x), {u, l, l}, x, std::nullopt, {{1, 2, false}}));
  t.push_back(TensorValue::from("riemann", riemann(m, x), {u, l, l, l}, x, std::nullopt, {{2, 3, true}}));
  t.push_back(TensorValue::from("ricci", ricci(m, x), {l, l}, x, std::nullopt, {{0, 1, false}}));
  t.push_back(TensorValue::scalar("ricci_scalar", ricci_scalar(m, x), x));
  const Faraday F = faraday(m, x);
  t.push_back(TensorValue::from("faraday", F.lower, {l, l}, x, std::nullopt, {{0, 1, true}}));
  t.push_back(TensorValue::from("faraday_mixed", F.mixed, {u, l}, x));
  t.push_back(TensorValue::scalar("faraday_square", faraday_square(m, x), x));
  t.push_back(TensorValue::from("stress_energy", em_stress_energy(m, x), {l, l}, x));
  t.push_back(TensorValue::from("einstein", einstein_tensor(m, x), {l, l}, x));
  t.push_back(TensorValue::from("einstein_maxwell", classical_einstein_maxwell(m, x), {l, l}, x));
  t.push_back(TensorValue::from("generalized_einstein", generalized_einstein_tensor(m, x), {l, l}, x));
  return t;
}

std::vector<TensorValue> bundle_tensors(const SpacetimeModel& m, const BundlePoint& p) {
  using V = Variance;
  const V u = V::kUpper, l = V::kLower;
  const Point4& x = p.x;
  const Point4& y = p.y;
  std::vector<TensorValue> t;
  t.push_back(TensorValue::scalar("lagrangian", randers_lagrangian(m, x, y, m.alpha), x, y));
  t.push_back(TensorValue::from("spray", spray(m, p), u, x, y));
  t.push_back(TensorValue::from("spray_B", spray_B(m, p), u, x, y));
  t.push_back(TensorValue::from("connection", nonlinear_connection(m, p), {u, l}, x, y));
  t.push_back(TensorValue::from("berwald", berwald_coeffs(m, p), {u, l, l}, x, y));
  t.push_back(TensorValue::from("n_curvature", n_curvature(m, p), {u, l, l}, x, y));
  const DCurvature d = d_curvature(m, p);
  t.push_back(TensorValue::from("tidal", d.tidal, {u, l}, x, y));
  t.push_back(TensorValue::from("d_curvature", d.curvature, {l, u, l, l}, x, y));
  t.push_back(TensorValue::from("d_ricci", d.ricci, {l, l}, x, y));
  t.push_back(TensorValue::scalar("d_scalar", d.scalar, x, y));
  const BScalar b = b_scalar_and_hessian(m, p);
  t.push_back(TensorValue::scalar("b_scalar", b.value, x, y));
  t.push_back(TensorValue::from("b_hessian", b.hessian, {l, l}, x, y));
  return t;
}

void emit_tensors(std::ostream& out, const std::vector<TensorValue>& t, bool csv) {
  out << (csv ? tensors_to_csv(t) : tensors_to_json(t));
}

int cmd_inspect(const ModelArgs& a, const std::string& xs, const std::string& ys, std::ostream& out,
                std::ostream& err) {
  const SpacetimeModel m = build_model(a);
  if (xs.empty()) {
    if (want_csv(a, false)) throw UsageError("inspect without --x prints the model as JSON only");
    out << print_model(m) << '\n';
    return kOk;
  }
  const Point4 x = to_vec4(xs, "--x");
  std::vector<TensorValue> t = base_tensors(m, x);
  try {
    const FiberMetric fm = fiber_metric(m, x);
    t.push_back(TensorValue::from("fiber_metric", fm.v, {Variance::kLower, Variance::kLower}, x, std::nullopt,
                                  {{0, 1, false}}));
  } catch (const SingularEvaluation& e) {
    err << "note: fiber metric skipped: " << e.what() << '\n';
  }
  if (!ys.empty()) {
    const auto more = bundle_tensors(m, {x, to_vec4(ys, "--y")});
    t.insert(t.end(), more.begin(), more.end());
  }
  emit_tensors(out, t, want_csv(a, false));
  return kOk;
}

struct VerifyArgs {
  int samples = 20;
  std::uint64_t seed = 42;
  double tol1 = 1e-10, tol2 = 1e-9, tol3 = 1e-7;
  std::string box;
  std::vector<std::string> checks;
  int threads = 0;
};

int cmd_verify(const ModelArgs& a, const VerifyArgs& v, std::ostream& out, std::ostream& err) {
  const SpacetimeModel m = build_model(a);
  SuiteOptions o;
  o.seed = v.seed;
  o.points = v.samples;
  o.tol = {v.tol1, v.tol2, v.tol3};
  o.checks = v.checks;
  o.threads = v.threads;
  if (!v.box.empty()) o.box = to_box(v.box);
  const auto reports = run_suite(m, o);
  out << (want_csv(a, false) ? reports_to_csv(reports) : reports_to_json(reports));
  int failed = 0;
  for (const auto& r : reports) {
    if (!r.pass) {
      ++failed;
      err << "FAIL " << r.check << ": max " << fmt(r.max) << " > " << fmt(r.tolerance) << '\n';
    }
  }
  err << reports.size() - failed << "/" << reports.size() << " checks passed\n";
  return failed ? kCheckFailed : kOk;
}

struct FlowArgs {
  std::string x0, y0, w0, W0, wdot0;
  double t_end = 10.0;
  int samples = 100;
  double rtol = 1e-10, atol = 1e-10;
  bool no_normalize = false;
};

WorldlineOptions flow_options(const FlowArgs& f) {
  WorldlineOptions o;
  o.samples = f.samples;
  o.ode.rtol = f.rtol;
  o.ode.atol = f.atol;
  o.normalize = !f.no_normalize;
  return o;
}

void emit_trajectory_json(std::ostream& out, const Trajectory& tr, const std::vector<Point4>* w,
                          const std::vector<Point4>* W) {
  ojson j;
  j["t"] = tr.t;
  j["x"] = tr.x;
  j["y"] = tr.y;
  if (w) j["w"] = *w;
  if (W) j["W"] = *W;
  j["steps"] = tr.steps;
  j["max_norm_drift"] = tr.max_norm_drift;
  out << j.dump(2) << '\n';
}

int cmd_geodesic(const ModelArgs& a, const FlowArgs& f, std::ostream& out) {
  const SpacetimeModel m = build_model(a);
  if (f.x0.empty() || f.y0.empty()) throw UsageError("geodesic needs --x0 and --y0");
  const Trajectory tr = integrate_worldline(m, {0.0, to_vec4(f.x0, "--x0"), to_vec4(f.y0, "--y0")}, m.alpha,
                                            f.t_end, flow_options(f));
  if (want_csv(a, true)) {
    write_trajectory_csv(out, tr);
  } else {
    emit_trajectory_json(out, tr, nullptr, nullptr);
  }
  return kOk;
}

int cmd_deviation(const ModelArgs& a, const FlowArgs& f, std::ostream& out) {
  const SpacetimeModel m = build_model(a);
  if (f.x0.empty() || f.y0.empty() || f.w0.empty()) throw UsageError("deviation needs --x0, --y0 and --w0");
  if (!f.W0.empty() && !f.wdot0.empty()) throw UsageError("give at most one of --W0 and --wdot0");
  Point4 rate{};
  DeviationRate kind = DeviationRate::kCovariant;
  if (!f.W0.empty()) rate = to_vec4(f.W0, "--W0");
  if (!f.wdot0.empty()) {
    rate = to_vec4(f.wdot0, "--wdot0");
    kind = DeviationRate::kCoordinate;
  }
  const DeviationTrajectory d =
      integrate_deviation(m, {0.0, to_vec4(f.x0, "--x0"), to_vec4(f.y0, "--y0")}, m.alpha,
                          to_vec4(f.w0, "--w0"), rate, f.t_end, kind, flow_options(f));
  if (want_csv(a, true)) {
    write_deviation_csv(out, d);
  } else {
    emit_trajectory_json(out, d.base, &d.w, &d.W);
  }
  return kOk;
}

void emit_pairs(std::ostream& out, const std::vector<std::pair<std::string, double>>& kv, bool csv) {
  if (csv) {
    out << "key,value\n";
    for (const auto& [k, v] : kv) out << k << ',' << fmt(v) << '\n';
    return;
  }
  ojson j = ojson::object();
  for (const auto& [k, v] : kv) j[k] = std::isfinite(v) ? ojson(v) : ojson(nullptr);
  out << j.dump(2) << '\n';
}

int cmd_theorem1(const ModelArgs& a, const std::string& xs, const std::string& ys, std::ostream& out) {
  const SpacetimeModel m = build_model(a);
  if (xs.empty() || ys.empty()) throw UsageError("theorem1 needs --x and --y");
  const Theorem1Terms t = theorem1_decomposition(m, {to_vec4(xs, "--x"), to_vec4(ys, "--y")});
  emit_pairs(out,
             {{"alpha", m.alpha},
              {"R", t.R},
              {"r", t.r},
              {"div_term", t.div_term},
              {"quad_term", t.quad_term},
              {"quad_expected", t.quad_expected},
              {"residual", t.residual}},
             want_csv(a, false));
  return kOk;
}

int cmd_efe(const ModelArgs& a, const std::string& xs, const std::string& ys, std::ostream& out) {
  const SpacetimeModel m = build_model(a);
  if (xs.empty()) throw UsageError("efe needs --x");
  const Point4 x = to_vec4(xs, "--x");
  const Variance l = Variance::kLower;
  std::vector<TensorValue> t;
  if (ys.empty()) {
    const Mat4<double> var = generalized_einstein_tensor(m, x);
    const Mat4<double> cem = classical_einstein_maxwell(m, x);
    Mat4<double> diff{};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) diff[i][j] = var[i][j] - cem[i][j];
    t.push_back(TensorValue::from("generalized_einstein", var, {l, l}, x));
    t.push_back(TensorValue::from("einstein_maxwell", cem, {l, l}, x));
    t.push_back(TensorValue::scalar("variational_vs_classical", max_abs(diff), x));
  } else {
    const Point4 y = to_vec4(ys, "--y");
    const GeneralizedEinstein g = generalized_einstein(m, {x, y});
    t.push_back(TensorValue::from("generalized_einstein", g.variational, {l, l}, x, y));
    t.push_back(TensorValue::from("einstein_maxwell", g.classical, {l, l}, x, y));
    t.push_back(TensorValue::from("generalized_einstein_literal", g.literal, {l, l}, x, y));
    t.push_back(TensorValue::scalar("variational_vs_classical", g.variational_vs_classical, x, y));
    t.push_back(TensorValue::scalar("literal_vs_variational", g.literal_vs_variational, x, y));
  }
  emit_tensors(out, t, want_csv(a, false));
  return kOk;
}

struct VolumeArgs {
  std::string x, box, integrand, fiber_nodes;
  int base_nodes = 6;
  double bound = 0.0;
};

FiberQuadrature parse_fiber_nodes(const std::string& s, FiberQuadrature q) {
  if (s.empty()) return q;
  const auto parts = split(s, ',');
  if (parts.size() != 4) throw UsageError("--fiber-nodes: expected radial,polar1,polar2,azimuth");
  int v[4];
  for (int i = 0; i < 4; ++i) {
    const double d = to_number(parts[i], "--fiber-nodes");
    if (d < 1 || d > 512 || d != static_cast<int>(d)) throw UsageError("--fiber-nodes: counts must be 1..512");
    v[i] = static_cast<int>(d);
  }
  return {v[0], v[1], v[2], v[3]};
}

int cmd_volume(const ModelArgs& a, const VolumeArgs& v, std::ostream& out) {
  const SpacetimeModel m = build_model(a);
  if (v.x.empty() && v.box.empty()) throw UsageError("integrate-volume needs --x and/or --box");
  std::optional<double> bound;
  if (v.bound != 0.0) bound = v.bound;
  std::vector<std::pair<std::string, double>> kv;
  if (!v.x.empty()) {
    const FiberBall ball = fiber_ball(m, to_vec4(v.x, "--x"), bound);
    const FiberIntegral I =
        fiber_integral(ball, [](const Point4&) { return 1.0; }, parse_fiber_nodes(v.fiber_nodes, {}));
    kv.push_back({"ball_bound", ball.bound});
    kv.push_back({"fiber_volume", I.value});
    kv.push_back({"fiber_volume_exact", ball_volume(ball)});
    kv.push_back({"perturbed_nodes", I.perturbed_nodes});
  }
  if (!v.box.empty()) {
    const Box4 box = to_box(v.box);
    const Expr f = parse(v.integrand.empty() ? "1" : v.integrand);
    const std::array<std::string, kDim> yn{"y0", "y1", "y2", "y3"};
    bool fiber_dependent = false;
    for (const std::string& s : free_symbols(f)) {
      const bool is_y = std::find(yn.begin(), yn.end(), s) != yn.end();
      const bool is_x = std::find(m.coords.begin(), m.coords.end(), s) != m.coords.end();
      if (is_y && is_x) throw ConfigurationError("integrand symbol '" + s + "' is both a coordinate and a fiber name");
      fiber_dependent |= is_y;
      if (!is_y && !is_x && !m.params.count(s) && s != "pi") {
        throw ConfigurationError("integrand: unbound symbol '" + s + "'");
      }
    }
    auto env_at = [&](const Point4& x, const Point4& y) {
      std::map<std::string, double, std::less<>> env(m.params.begin(), m.params.end());
      for (int i = 0; i < kDim; ++i) {
        env[m.coords[i]] = x[i];
        env[yn[i]] = y[i];
      }
      return env;
    };
    ProductQuadrature q;
    q.base = v.base_nodes;
    q.fiber = parse_fiber_nodes(v.fiber_nodes, q.fiber);
    q.bound = bound;
    const double tm = tm_integral(m, box, [&](const Point4& x, const Point4& y) { return evaluate(f, env_at(x, y)); }, q);
    kv.push_back({"tm_integral", tm});
    if (!fiber_dependent) {
      const double base = base_integral(m, box, [&](const Point4& x) { return evaluate(f, env_at(x, {})); },
                                        v.base_nodes);
      kv.push_back({"base_integral", base});
      kv.push_back({"relative_difference", std::abs(tm - base) / std::max(std::abs(base), 1e-300)});
    }
  }
  emit_pairs(out, kv, want_csv(a, false));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randers tangent-bundle geometry engine", "tmu"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  ModelArgs ma;
  std::string xs, ys;
  VerifyArgs va;
  FlowArgs fa;
  VolumeArgs vo;

  auto* inspect = app.add_subcommand("inspect", "print the model, or tensors at a point");
  add_model_options(inspect, ma);
  inspect->add_option("--x", xs, "base point x0,x1,x2,x3");
  inspect->add_option("--y", ys, "fiber vector; adds the spray-side tensors");

  auto* verify = app.add_subcommand("verify", "run the residual suite");
  add_model_options(verify, ma);
  verify->add_option("--samples", va.samples, "points per check")->check(CLI::PositiveNumber);
  verify->add_option("--seed", va.seed, "sampler seed");
  verify->add_option("--tol-tier1", va.tol1, "tolerance for first-derivative checks");
  verify->add_option("--tol-tier2", va.tol2, "tolerance for second-derivative checks");
  verify->add_option("--tol-tier3", va.tol3, "tolerance for third-derivative checks");
  verify->add_option("--box", va.box, "sampling box lo:hi,lo:hi,lo:hi,lo:hi");
  verify->add_option("--checks", va.checks, "subset of checks (comma separated)")->delimiter(',');
  verify->add_option("--threads", va.threads, "worker threads (0: all cores)");

  auto* geodesic = app.add_subcommand("geodesic", "integrate a charged worldline");
  auto* deviation = app.add_subcommand("deviation", "integrate a worldline with its deviation vector");
  for (auto* sub : {geodesic, deviation}) {
    add_model_options(sub, ma);
    sub->add_option("--x0", fa.x0, "initial position");
    sub->add_option("--y0", fa.y0, "initial velocity (timelike)");
    sub->add_option("--t-end", fa.t_end, "final parameter value");
    sub->add_option("--samples", fa.samples, "output intervals")->check(CLI::PositiveNumber);
    sub->add_option("--rtol", fa.rtol, "relative tolerance");
    sub->add_option("--atol", fa.atol, "absolute tolerance");
    sub->add_flag("--no-normalize", fa.no_normalize, "keep |y0| as given");
  }
  deviation->add_option("--w0", fa.w0, "initial deviation");
  deviation->add_option("--W0", fa.W0, "initial covariant rate Dw/dt");
  deviation->add_option("--wdot0", fa.wdot0, "initial coordinate rate dw/dt");

  auto* theorem1 = app.add_subcommand("theorem1", "scalar decomposition R = r + div + quad");
  add_model_options(theorem1, ma);
  theorem1->add_option("--x", xs, "base point");
  theorem1->add_option("--y", ys, "fiber vector");

  auto* efe = app.add_subcommand("efe", "generalized and classical Einstein tensors");
  add_model_options(efe, ma);
  efe->add_option("--x", xs, "base point");
  efe->add_option("--y", ys, "fiber vector; adds the bundle-side assembly");

  auto* volume = app.add_subcommand("integrate-volume", "fiber ball volume and tangent-bundle integrals");
  add_model_options(volume, ma);
  volume->add_option("--x", vo.x, "base point for the fiber ball volume");
  volume->add_option("--box", vo.box, "base box lo:hi,lo:hi,lo:hi,lo:hi");
  volume->add_option("--integrand", vo.integrand, "expression in coordinates, parameters and y0..y3");
  volume->add_option("--base-nodes", vo.base_nodes, "Gauss nodes per base coordinate")->check(CLI::Range(1, 64));
  volume->add_option("--fiber-nodes", vo.fiber_nodes, "radial,polar1,polar2,azimuth");
  volume->add_option("--bound", vo.bound, "fiber ball bound c (default sqrt(2)/pi)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (inspect->parsed()) return cmd_inspect(ma, xs, ys, out, err);
    if (verify->parsed()) return cmd_verify(ma, va, out, err);
    if (geodesic->parsed()) return cmd_geodesic(ma, fa, out);
    if (deviation->parsed()) return cmd_deviation(ma, fa, out);
    if (theorem1->parsed()) return cmd_theorem1(ma, xs, ys, out);
    if (efe->parsed()) return cmd_efe(ma, xs, ys, out);
    if (volume->parsed()) return cmd_volume(ma, vo, out);
  } catch (const ParseError& e) {
    err << "error: " << e.annotated() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SingularEvaluation& e) {
    err << "error: " << e.what() << '\n';
    return kSingular;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace tmu::cli
