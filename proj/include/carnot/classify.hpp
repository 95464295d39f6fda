#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carnot/group.hpp"

namespace carnot {

// Stratified Lie algebra of step 2 given by structure constants:
//   [X_i, X_k] = sum_j c[j](i,k) T_j,   c[j] antisymmetric in (i,k).
struct LieSpec {
  int m1 = 0;
  int m2 = 0;
  std::vector<Mat> c;  // c[j] is m1 x m1, antisymmetric
};

// Parses a line-based bracket listing:
//   m1 <int>
//   m2 <int>
//   bracket <i> <k> <j> <value>     # [X_i,X_k] += value T_j (1-based)
// '#' starts a comment.  Antisymmetry is completed automatically.
LieSpec parse_lie_spec(const std::string& text);
LieSpec read_lie_spec_file(const std::string& path);

// B^j with (B^j)_{ki} = c[j](i,k); the sign convention is pinned by the
// round-trip test on group commutators of basis points.
GroupSpec to_group_spec(const LieSpec& ls, const std::string& name = "",
                        std::uint64_t seed = 0);

// c[j](i,k) read back from the group law.
LieSpec structure_constants(const GroupSpec& spec);

enum class Verdict { Yes, No, Uncertain };

const char* to_string(Verdict v);

struct ClassificationReport {
  Verdict plentiful = Verdict::Uncertain;
  bool htype = false;
  std::optional<Vec> witness_lambda;  // pencil coefficients, |lambda| = 1
  std::optional<Vec> witness_v;       // unit normal of a failing hyperplane
  int min_pencil_rank = 0;
  std::string mode;  // "exact" or "certified-numeric"
  double sigma3_min = 0.0;            // attained min of sigma_3 (numeric mode)
  double sigma_ratio = 0.0;           // sigma3/sigma1 at the minimizer
  // H-type diagnostics: first violated pair and residual of
  // B^i B^j + B^j B^i + 2 delta_ij I.
  int htype_i = 0, htype_j = 0;
  double htype_residual = 0.0;
};

struct HTypeResult {
  bool htype = false;
  int i = 0, j = 0;      // 1-based indices of the first violated pair
  double residual = 0.0; // max-norm of the violated identity
};

// Entrywise check of B^i B^j + B^j B^i = -2 delta_ij I (tolerance 1e-12).
HTypeResult is_h_type(const GroupSpec& spec);

// Decides plentifulness through the rank-2 pencil characterization:
// the group fails to be plentiful iff some nonzero lambda makes
// sum_j lambda_j B^j a rank-2 matrix.  m2 <= 2 is decided exactly
// (Pfaffian minors on the projective lambda-line); m2 >= 3 is decided by
// seeded multi-start minimization of sigma_3 over the unit lambda-sphere,
// except that the H-type identity, when it holds, settles the verdict.
ClassificationReport is_plentiful(const GroupSpec& spec,
                                  std::uint64_t seed = 0);

struct OracleResult {
  bool plentiful_evidence = true;   // no failing hyperplane found
  std::optional<Vec> witness_v;     // unit normal of a failing hyperplane
  int worst_rank = 0;               // smallest commutator rank observed
};

// Brute-force hyperplane sampling: for random unit v, checks that the
// commutator coordinates <B^j u_a, u_b> over an orthonormal basis of the
// hyperplane v-perp span R^m2.
OracleResult plentiful_bruteforce_oracle(const GroupSpec& spec,
                                         int n_subspaces, std::uint64_t seed,
                                         const std::vector<Vec>& extra_v = {});

struct CatalogEntry {
  std::string key;
  std::string description;
  GroupSpec spec;
  Verdict expected_plentiful = Verdict::Uncertain;
  bool expected_htype = false;
};

// Built-in groups: h1, h2, h3, g752, f32, quat, h1xr.
const std::vector<CatalogEntry>& builtin_catalog();
const CatalogEntry* find_builtin(const std::string& key);

}  // namespace carnot
