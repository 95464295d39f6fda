#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "carnot/classify.hpp"
#include "carnot/splitting.hpp"

namespace carnot {

struct SuiteResult {
  std::string name;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  std::int64_t first_bad_index = -1;
  double worst_margin = 0.0;  // positive means a violated sample
  std::uint64_t seed = 0;
};

struct CheckConfig {
  std::uint64_t seed = 0;
  std::int64_t algebra_samples = 10000;     // associativity, dilations, d left-invariance
  std::int64_t bracket_samples = 100000;
  std::int64_t triangle_samples = 1000000;
  std::int64_t metric_samples = 100000;     // sandwich, projections, cyl bounds
  std::int64_t cone_samples = 10000;        // cone lemmas (ii), (iii)
  std::int64_t cone_union_samples = 1000;   // cone lemma (i)
  std::int64_t ilip_sets = 1000;
  std::int64_t entry_samples = 10000;
  int rotation_samples = 20;
  int oracle_specs = 200;
  int oracle_subspaces = 2000;
  std::string inject_fault;  // "" or "cone-sign" (testing hook)
  std::vector<std::string> groups;  // catalog keys; empty = all
};

std::vector<SuiteResult> run_all_checks(const CheckConfig& config);

// Fixed-format summary (stable across runs and thread counts).
void print_summary(std::ostream& os, const std::vector<SuiteResult>& results);
bool all_passed(const std::vector<SuiteResult>& results);

// Interior point of C^sign(0, alpha) in rotated coordinates, mapped back to
// the original frame; margin keeps samples away from the boundary.
Point sample_cone_point(const Splitting& split, double alpha, ConeSign sign,
                        Rng& rng, double margin = 1.0 - 1e-9);

}  // namespace carnot
