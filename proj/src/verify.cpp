#include "tmu/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tmu/error.hpp"
#include "tmu/quadrature.hpp"
#include "tmu/sampling.hpp"
#include "tmu/tm_metric.hpp"

namespace tmu {

double mixed_residual(double diff, double scale) { return std::abs(diff) / std::max(1.0, std::abs(scale)); }

double relative_residual(double diff, double scale) {
  if (diff == 0.0) return 0.0;
  return std::abs(diff) / std::max(1e-12, std::abs(scale));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
void flatten_into(std::vector<double>& out, const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    out.push_back(v);
  } else {
    for (const auto& e : v) flatten_into(out, e);
  }
}
template <class T>
std::vector<double> flat(const T& v) {
  std::vector<double> out;
  flatten_into(out, v);
  return out;
}

double max_abs_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s = std::max(s, std::abs(e));
  return s;
}
double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

// Residual of f(lambda y) against lambda^d f(y), relative to the latter.
double homogeneity(const std::function<std::vector<double>(const BundlePoint&)>& f, const BundlePoint& p,
                   int degree) {
  const double lambda = 2.0;
  BundlePoint q = p;
  for (double& c : q.y) c *= lambda;
  std::vector<double> a = f(p);
  const std::vector<double> b = f(q);
  for (double& e : a) e *= std::pow(lambda, degree);
  return relative_residual(max_diff(b, a), max_abs_of(a));
}

enum class Tier { k1, k2, k3, kFixed, kInfo };
enum class Domain { kBase, kBundle };

struct Sample {
  BundlePoint p;
  Point4 y2{}, y3{};
  std::uint64_t field_seed = 0;
};

struct Check {
  std::string name;
  Tier tier;
  Domain domain;
  double fixed_tol;
  std::function<double(const SpacetimeModel&, const Sample&)> residual;
  bool electrovacuum_only = false;  // informational on other models
};

double mixed_vec(const std::vector<double>& a, const std::vector<double>& b) {
  return mixed_residual(max_diff(a, b), max_abs_of(b));
}

Mat4<double> gamma_y(const Rank3<double>& gam, const Point4& y) {
  Mat4<double> n{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) n[i][j] += gam[i][j][k] * y[k];
  return n;
}

BaseVectorField random_polynomial_field(std::uint64_t seed) {
  Rng rng(seed);
  std::array<double, kDim> c{};
  Mat4<double> b{};
  std::array<double, kDim> d{};
  std::array<int, kDim> u{}, v{};
  for (int i = 0; i < kDim; ++i) {
    c[i] = rng.uniform(-1, 1);
    for (int j = 0; j < kDim; ++j) b[i][j] = rng.uniform(-1, 1);
    d[i] = rng.uniform(-1, 1);
    u[i] = static_cast<int>(rng.uniform() * kDim);
    v[i] = static_cast<int>(rng.uniform() * kDim);
  }
  return [=](const Vec4<Jet>& x) {
    Vec4<Jet> Y;
    for (int i = 0; i < kDim; ++i) {
      Jet s = x[0] * 0.0 + c[i];
      for (int j = 0; j < kDim; ++j) s = s + b[i][j] * x[j];
      Y[i] = s + d[i] * x[u[i]] * x[v[i]];
    }
    return Y;
  };
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = [] {
    std::vector<Check> c;
    c.push_back({"metric_symmetry", Tier::k1, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      const Mat4<double> g = metric_value(m, s.p.x);
      const Rank3<double> gam = christoffel(m, s.p.x);
      double d = 0.0, sc = 0.0;
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
          d = std::max(d, std::abs(g[i][j] - g[j][i]));
          sc = std::max(sc, std::abs(g[i][j]));
          for (int k = 0; k < kDim; ++k) d = std::max(d, std::abs(gam[i][j][k] - gam[i][k][j]));
        }
      return mixed_residual(d, sc);
    }});
    c.push_back({"riemann_symmetries", Tier::k2, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      const Rank4<double> r = riemann_lowered(m, s.p.x);
      double d = 0.0;
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
          for (int k = 0; k < kDim; ++k)
            for (int l = 0; l < kDim; ++l) {
              d = std::max(d, std::abs(r[i][j][k][l] + r[j][i][k][l]));
              d = std::max(d, std::abs(r[i][j][k][l] + r[i][j][l][k]));
              d = std::max(d, std::abs(r[i][j][k][l] - r[k][l][i][j]));
            }
      return mixed_residual(d, max_abs(r));
    }});
    c.push_back({"first_bianchi", Tier::k2, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      const Rank4<double> r = riemann(m, s.p.x);
      double d = 0.0;
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
          for (int k = 0; k < kDim; ++k)
            for (int l = 0; l < kDim; ++l)
              d = std::max(d, std::abs(r[i][j][k][l] + r[i][k][l][j] + r[i][l][j][k]));
      return mixed_residual(d, max_abs(r));
    }});
    c.push_back({"contracted_bianchi", Tier::k3, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      return mixed_residual(max_abs(covariant_divergence(m, s.p.x, einstein_field())), 0.0);
    }});
    c.push_back({"maxwell_homogeneous", Tier::k2, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      return mixed_residual(max_abs(maxwell_residuals(m, s.p.x).homogeneous), max_abs(faraday(m, s.p.x).lower));
    }});
    c.push_back({"maxwell_source_free", Tier::k2, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      return mixed_residual(max_abs(maxwell_residuals(m, s.p.x).current), 0.0);
    }});
    c.push_back({"em_trace_free", Tier::k1, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      const Mat4<double> T = em_stress_energy(m, s.p.x);
      const Mat4<double> gi = inverse(metric_value(m, s.p.x));
      double tr = 0.0;
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) tr += gi[i][j] * T[i][j];
      return mixed_residual(tr, max_abs(T));
    }});
    c.push_back({"homogeneity_spray", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      return homogeneity([&](const BundlePoint& p) { return flat(spray(m, p)); }, s.p, 2);
    }});
    c.push_back({"homogeneity_connection", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      return homogeneity([&](const BundlePoint& p) { return flat(nonlinear_connection(m, p)); }, s.p, 1);
    }});
    c.push_back({"homogeneity_berwald", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      return homogeneity([&](const BundlePoint& p) { return flat(berwald_coeffs(m, p)); }, s.p, 0);
    }});
    c.push_back({"homogeneity_tidal", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      return homogeneity([&](const BundlePoint& p) { return flat(tidal_tensor(m, p)); }, s.p, 2);
    }});
    c.push_back({"homogeneity_ricci", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      return homogeneity([&](const BundlePoint& p) { return flat(d_curvature(m, p).ricci); }, s.p, 0);
    }});
    c.push_back({"homogeneity_b_scalar", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      return homogeneity([&](const BundlePoint& p) { return flat(b_scalar_and_hessian(m, p).value); }, s.p, 2);
    }});
    c.push_back({"homogeneity_b_hessian", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      return homogeneity([&](const BundlePoint& p) { return flat(b_scalar_and_hessian(m, p).hessian); }, s.p, 0);
    }});
    c.push_back({"derivs_b_closed_form", Tier::k1, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      const FiberDerivsB a = fiber_derivs_B(m, s.p), b = fiber_derivs_B_closed_form(m, s.p);
      return std::max(mixed_vec(flat(a.Bj), flat(b.Bj)), mixed_vec(flat(a.Bjk), flat(b.Bjk)));
    }});
    c.push_back({"reconstruction_tidal", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      const DCurvature d = d_curvature(m, s.p);
      const Point4& y = s.p.y;
      Mat4<double> rec{};
      for (int i = 0; i < kDim; ++i)
        for (int k = 0; k < kDim; ++k)
          for (int j = 0; j < kDim; ++j)
            for (int l = 0; l < kDim; ++l) rec[i][k] += d.curvature[j][i][k][l] * y[j] * y[l];
      return relative_residual(max_diff(flat(d.tidal), flat(rec)), max_abs(d.tidal));
    }});
    c.push_back({"reconstruction_trace", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      const DCurvature d = d_curvature(m, s.p);
      double tr = 0.0, ryy = 0.0;
      for (int i = 0; i < kDim; ++i) tr += d.tidal[i][i];
      for (int j = 0; j < kDim; ++j)
        for (int l = 0; l < kDim; ++l) ryy += d.ricci[j][l] * s.p.y[j] * s.p.y[l];
      return relative_residual(tr + ryy, max_abs(d.tidal));
    }});
    c.push_back({"alpha_zero_collapse", Tier::k1, Domain::kBundle, 0, [](const SpacetimeModel& m_in, const Sample& s) {
      const SpacetimeModel m = with_alpha(m_in, 0.0);
      const Point4& y = s.p.y;
      const Rank3<double> gam = christoffel(m, s.p.x);
      const Rank4<double> r = riemann(m, s.p.x);
      const Mat4<double> rl = ricci(m, s.p.x);
      const DCurvature d = d_curvature(m, s.p);
      Mat4<double> Ey{};
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
          for (int k = 0; k < kDim; ++k)
            for (int l = 0; l < kDim; ++l) Ey[i][j] -= r[i][k][j][l] * y[k] * y[l];
      double res = mixed_vec(flat(nonlinear_connection(m, s.p)), flat(gamma_y(gam, y)));
      res = std::max(res, mixed_vec(flat(berwald_coeffs(m, s.p)), flat(gam)));
      res = std::max(res, mixed_vec(flat(d.tidal), flat(Ey)));
      res = std::max(res, mixed_vec(flat(d.ricci), flat(rl)));
      res = std::max(res, mixed_residual(d.scalar - ricci_scalar(m, s.p.x), ricci_scalar(m, s.p.x)));
      return res;
    }});
    c.push_back({"theorem1_y_independence", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      const double a = quad_term(m, s.p), b = quad_term(m, {s.p.x, s.y2}), q = quad_term(m, {s.p.x, s.y3});
      const double spread = std::max({a, b, q}) - std::min({a, b, q});
      return mixed_residual(spread, a);
    }});
    c.push_back({"theorem1_quad_term", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      const double expected = 1.5 * m.alpha * m.alpha * faraday_square(m, s.p.x);
      return mixed_residual(quad_term(m, s.p) - expected, expected);
    }});
    c.push_back({"theorem1_residual", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      const Theorem1Terms t = theorem1_decomposition(m, s.p);
      return mixed_residual(t.residual, std::max({std::abs(t.R), std::abs(t.r), std::abs(t.div_term)}));
    }});
    c.push_back({"einstein_vacuum", Tier::k2, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      return mixed_residual(max_abs(generalized_einstein_tensor(m, s.p.x)), 0.0);
    }, true});
    c.push_back({"einstein_vs_classical", Tier::k2, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      const Mat4<double> a = generalized_einstein_tensor(m, s.p.x);
      const Mat4<double> b = classical_einstein_maxwell(m, s.p.x);
      return mixed_vec(flat(a), flat(b));
    }});
    c.push_back({"einstein_literal_difference", Tier::kInfo, Domain::kBundle, 0,
                 [](const SpacetimeModel& m, const Sample& s) {
                   return generalized_einstein(m, s.p).literal_vs_variational;
                 }});
    c.push_back({"fiber_det", Tier::kFixed, Domain::kBase, 1e-12, [](const SpacetimeModel& m, const Sample& s) {
      const FiberMetric f = fiber_metric(m, s.p.x);
      return relative_residual(f.det_v + f.det_g, f.det_g);
    }});
    c.push_back({"fiber_ball_volume", Tier::kFixed, Domain::kBase, 1e-8, [](const SpacetimeModel& m, const Sample& s) {
      const FiberBall b = fiber_ball(m, s.p.x);
      return std::abs(fiber_integral(b, [](const Point4&) { return 1.0; }).value - 1.0);
    }});
    c.push_back({"divergence_lift", Tier::k2, Domain::kBundle, 0, [](const SpacetimeModel& m, const Sample& s) {
      const BaseVectorField Y = random_polynomial_field(s.field_seed);
      const double h = horizontal_divergence(m, s.p, horizontal_lift(Y), 1, 0.0);
      const double b = base_divergence(m, s.p.x, Y);
      return relative_residual(h - b, b);
    }});
    c.push_back({"conservation", Tier::k3, Domain::kBase, 0, [](const SpacetimeModel& m, const Sample& s) {
      return mixed_residual(max_abs(conservation_residual(m, s.p.x)), 0.0);
    }});
    return c;
  }();
  return checks;
}

const char* tier_name(Tier t) {
  switch (t) {
    case Tier::k1: return "tier1";
    case Tier::k2: return "tier2";
    case Tier::k3: return "tier3";
    case Tier::kFixed: return "fixed";
    case Tier::kInfo: return "info";
  }
  return "?";
}

double tolerance_for(const Check& c, const Tolerances& t) {
  switch (c.tier) {
    case Tier::k1: return t.tier1;
    case Tier::k2: return t.tier2;
    case Tier::k3: return t.tier3;
    case Tier::kFixed: return c.fixed_tol;
    case Tier::kInfo: return kInf;
  }
  return 0.0;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const Check& c : registry()) n.push_back(c.name);
    return n;
  }();
  return names;
}

Vec4<double> conservation_residual(const SpacetimeModel& m, const Point4& x) {
  return covariant_divergence(m, x, generalized_einstein_field());
}

std::vector<ResidualReport> run_suite(const SpacetimeModel& m, const SuiteOptions& opt) {
  if (opt.points < 1) throw UsageError("suite needs at least one point");
  std::vector<const Check*> selected;
  if (opt.checks.empty()) {
    for (const Check& c : registry()) selected.push_back(&c);
  } else {
    for (const std::string& n : opt.checks) {
      auto it = std::find_if(registry().begin(), registry().end(), [&](const Check& c) { return c.name == n; });
      if (it == registry().end()) throw UsageError("unknown check '" + n + "'");
      selected.push_back(&*it);
    }
  }

  const Box4 box = sampling_box(m, opt.box);
  Rng rng(opt.seed);
  std::vector<Sample> samples(opt.points);
  for (Sample& s : samples) {
    s.p.x = sample_base_point(m, box, rng);
    s.p.y = sample_timelike(m, s.p.x, rng);
    s.y2 = sample_timelike(m, s.p.x, rng);
    s.y3 = sample_timelike(m, s.p.x, rng);
    s.field_seed = static_cast<std::uint64_t>(rng.uniform() * 0x1.0p53);
  }

  const std::size_t n_tasks = selected.size() * samples.size();
  std::vector<double> residual(n_tasks, 0.0);
  std::vector<std::string> error(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const Check& c = *selected[t / samples.size()];
      const Sample& s = samples[t % samples.size()];
      try {
        const double r = c.residual(m, s);
        residual[t] = std::isnan(r) ? kInf : r;
        if (std::isnan(r)) error[t] = "residual is NaN";
      } catch (const std::exception& e) {
        residual[t] = kInf;
        error[t] = e.what();
      }
    }
  };
  int nthreads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::clamp(nthreads, 1, static_cast<int>(std::max<std::size_t>(n_tasks, 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ostringstream alpha;
  alpha << fmt(m.alpha) << (m.alpha_is_star ? " (star)" : "");
  const std::map<std::string, std::string> conventions{
      {"signature", "+---"},
      {"curvature", "r^i_jkl = d_k gamma^i_jl - d_l gamma^i_jk + ...; r_jl = r^i_jil"},
      {"stress_energy", "landau"},
      {"div_term", "levi_civita_reference"},
      {"fiber_ball_bound", fmt(default_ball_bound())},
      {"alpha", alpha.str()},
      {"residual", "|d|/max(1,|ref|) or |d|/max(1e-12,|ref|) per check"},
  };

  std::vector<ResidualReport> out;
  for (std::size_t ci = 0; ci < selected.size(); ++ci) {
    const Check& c = *selected[ci];
    ResidualReport r;
    r.check = c.name;
    r.model = m.name;
    r.tier = tier_name(c.tier);
    r.tolerance = tolerance_for(c, opt.tol);
    r.asserted = c.tier != Tier::kInfo && (!c.electrovacuum_only || m.electrovacuum);
    r.seed = opt.seed;
    r.conventions = conventions;
    for (std::size_t si = 0; si < samples.size(); ++si) {
      const std::size_t t = ci * samples.size() + si;
      std::vector<double> pt(samples[si].p.x.begin(), samples[si].p.x.end());
      if (c.domain == Domain::kBundle) pt.insert(pt.end(), samples[si].p.y.begin(), samples[si].p.y.end());
      r.points.push_back(std::move(pt));
      r.residuals.push_back(residual[t]);
      r.errors.push_back(error[t]);
    }
    r.max = *std::max_element(r.residuals.begin(), r.residuals.end());
    r.mean = std::isinf(r.max) ? kInf : pairwise_sum(r.residuals) / static_cast<double>(r.residuals.size());
    r.pass = !r.asserted || r.max <= r.tolerance;
    out.push_back(std::move(r));
  }
  return out;
}

bool all_pass(const std::vector<ResidualReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const ResidualReport& r) { return r.pass; });
}

namespace {

nlohmann::ordered_json num(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}
double from_num(const nlohmann::json& j) { return j.is_null() ? kInf : j.get<double>(); }

}  // namespace

std::string reports_to_json(const std::vector<ResidualReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ResidualReport& r : reports) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    j["model"] = r.model;
    j["tier"] = r.tier;
    j["tolerance"] = num(r.tolerance);
    j["asserted"] = r.asserted;
    j["pass"] = r.pass;
    j["max"] = num(r.max);
    j["mean"] = num(r.mean);
    j["seed"] = r.seed;
    j["conventions"] = r.conventions;
    j["points"] = r.points;
    nlohmann::ordered_json res = nlohmann::ordered_json::array();
    for (double v : r.residuals) res.push_back(num(v));
    j["residuals"] = res;
    nlohmann::ordered_json errs = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < r.errors.size(); ++i)
      if (!r.errors[i].empty()) errs[std::to_string(i)] = r.errors[i];
    j["errors"] = errs;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ResidualReport> reports_from_json(const std::string& text) {
  std::vector<ResidualReport> out;
  try {
    const nlohmann::json arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      ResidualReport r;
      r.check = j.at("check").get<std::string>();
      r.model = j.at("model").get<std::string>();
      r.tier = j.at("tier").get<std::string>();
      r.tolerance = from_num(j.at("tolerance"));
      r.asserted = j.at("asserted").get<bool>();
      r.pass = j.at("pass").get<bool>();
      r.max = from_num(j.at("max"));
      r.mean = from_num(j.at("mean"));
      r.seed = j.at("seed").get<std::uint64_t>();
      r.conventions = j.at("conventions").get<std::map<std::string, std::string>>();
      r.points = j.at("points").get<std::vector<std::vector<double>>>();
      for (const auto& v : j.at("residuals")) r.residuals.push_back(from_num(v));
      r.errors.assign(r.residuals.size(), "");
      for (const auto& [k, v] : j.at("errors").items()) r.errors.at(std::stoul(k)) = v.get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed report JSON: ") + e.what());
  }
  return out;
}

std::string reports_to_csv(const std::vector<ResidualReport>& reports) {
  std::ostringstream os;
  os << "check,model,tier,tolerance,asserted,pass,seed,point,x0,x1,x2,x3,y0,y1,y2,y3,residual,error\n";
  for (const ResidualReport& r : reports) {
    for (std::size_t i = 0; i < r.residuals.size(); ++i) {
      os << r.check << ',' << r.model << ',' << r.tier << ',' << fmt(r.tolerance) << ','
         << (r.asserted ? "true" : "false") << ',' << (r.pass ? "true" : "false") << ',' << r.seed << ',' << i;
      for (int k = 0; k < 2 * kDim; ++k) {
        os << ',';
        if (k < static_cast<int>(r.points[i].size())) os << fmt(r.points[i][k]);
      }
      os << ',' << fmt(r.residuals[i]) << ',';
      std::string e = r.errors[i];
      std::replace(e.begin(), e.end(), '"', '\'');
      if (!e.empty()) os << '"' << e << '"';
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace tmu
