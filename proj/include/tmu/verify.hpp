#pragma once

// Residual reports for the geometric identities, run as a seeded suite.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmu/bundle_geom.hpp"

namespace tmu {

struct Tolerances {
  double tier1 = 1e-10;  // first derivatives
  double tier2 = 1e-9;   // second
  double tier3 = 1e-7;   // third
};

struct ResidualReport {
  std::string check;
  std::string model;
  std::string tier;  // "tier1", "tier2", "tier3", "fixed", "info"
  std::vector<std::vector<double>> points;  // x, or x followed by y
  std::vector<double> residuals;            // +inf where evaluation failed
  std::vector<std::string> errors;          // per point, empty when fine
  double max = 0.0;
  double mean = 0.0;
  double tolerance = 0.0;
  bool asserted = true;  // informational checks never fail the suite
  bool pass = true;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> conventions;
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  int points = 20;
  Tolerances tol{};
  std::vector<std::string> checks;  // empty: all, in registry order
  std::optional<Box4> box;
  int threads = 0;  // 0: hardware concurrency
};

// Registry order; every check name appears exactly once.
const std::vector<std::string>& check_names();

std::vector<ResidualReport> run_suite(const SpacetimeModel& m, const SuiteOptions& opt = {});
bool all_pass(const std::vector<ResidualReport>& reports);

// nabla_j G^ij for the variational generalized Einstein tensor.
Vec4<double> conservation_residual(const SpacetimeModel& m, const Point4& x);

std::string reports_to_json(const std::vector<ResidualReport>& reports);
std::vector<ResidualReport> reports_from_json(const std::string& text);
std::string reports_to_csv(const std::vector<ResidualReport>& reports);

// Scale-aware differences used by the checks.
// |a - b| / max(1, |b|)
double mixed_residual(double diff, double scale);
// |a - b| / |b| with a floor of 1e-12 on |b|
double relative_residual(double diff, double scale);

}  // namespace tmu
