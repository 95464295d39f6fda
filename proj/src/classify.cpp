#include "carnot/classify.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "carnot/parallel.hpp"

namespace carnot {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "uncertain";
  }
}

// ---------------------------------------------------------------------------
// Lie spec parsing

LieSpec parse_lie_spec(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int m1 = -1, m2 = -1;
  struct Entry { int i, k, j; double value; int line; };
  std::vector<Entry> entries;

  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = line.substr(0, line.find('#'));
    std::istringstream ls(stripped);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "m1" || head == "m2") {
      int v;
      if (!(ls >> v) || v <= 0)
        throw ParseError("expected positive integer after '" + head + "'",
                         lineno, int(head.size()) + 2);
      (head == "m1" ? m1 : m2) = v;
    } else if (head == "bracket") {
      Entry e;
      e.line = lineno;
      if (!(ls >> e.i >> e.k >> e.j >> e.value))
        throw ParseError("expected 'bracket i k j value'", lineno, 9);
      entries.push_back(e);
    } else {
      throw ParseError("unknown directive '" + head + "'", lineno, 1);
    }
    std::string trailing;
    if (ls >> trailing)
      throw ParseError("unexpected token '" + trailing + "'", lineno,
                       int(stripped.size()));
  }
  if (m1 <= 0) throw ParseError("missing 'm1' directive", lineno, 1);
  if (m2 <= 0) throw ParseError("missing 'm2' directive", lineno, 1);

  LieSpec ls;
  ls.m1 = m1;
  ls.m2 = m2;
  ls.c.assign(std::size_t(m2), Mat::Zero(m1, m1));
  std::vector<Mat> seen(std::size_t(m2), Mat::Zero(m1, m1));

  for (const Entry& e : entries) {
    if (e.i < 1 || e.i > m1 || e.k < 1 || e.k > m1)
      throw ParseError("bracket index out of range [1,m1]", e.line, 9);
    if (e.j < 1 || e.j > m2)
      throw ParseError("layer index out of range [1,m2]", e.line, 9);
    if (e.i == e.k && e.value != 0.0)
      throw ParseError("bracket [X_i,X_i] must vanish", e.line, 9);
    Mat& cj = ls.c[std::size_t(e.j - 1)];
    Mat& sj = seen[std::size_t(e.j - 1)];
    const int a = e.i - 1, b = e.k - 1;
    if (sj(a, b) != 0.0 && cj(a, b) != e.value) {
      std::ostringstream os;
      os << "inconsistent duplicate bracket (" << e.i << "," << e.k << ") -> T"
         << e.j << ": " << cj(a, b) << " vs " << e.value;
      throw ParseError(os.str(), e.line, 9);
    }
    cj(a, b) = e.value;
    cj(b, a) = -e.value;  // antisymmetry completed automatically
    sj(a, b) = sj(b, a) = 1.0;
  }

  // stratification: the c[j] must be linearly independent ([V1,V1] = V2)
  Mat V(m1 * m1, m2);
  for (int j = 0; j < m2; ++j)
    V.col(j) = Eigen::Map<const Vec>(ls.c[std::size_t(j)].data(), m1 * m1);
  Eigen::JacobiSVD<Mat> svd(V);
  if (svd.singularValues().size() == 0 ||
      svd.singularValues()[m2 - 1] <= 1e-10 * (svd.singularValues()[0] + 1e-300))
    throw ParseError("brackets do not generate V2 (layer matrices dependent "
                     "or zero)", lineno, 1);
  return ls;
}

LieSpec read_lie_spec_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open lie spec file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_lie_spec(os.str());
}

GroupSpec to_group_spec(const LieSpec& ls, const std::string& name,
                        std::uint64_t seed) {
  std::vector<Mat> B(std::size_t(ls.m2));
  for (int j = 0; j < ls.m2; ++j)
    B[std::size_t(j)] = ls.c[std::size_t(j)].transpose();  // (B^j)_{ki} = c[j](i,k)
  return make_group_spec(ls.m1, ls.m2, std::move(B), std::nullopt, name, seed);
}

LieSpec structure_constants(const GroupSpec& spec) {
  LieSpec ls;
  ls.m1 = spec.m1;
  ls.m2 = spec.m2;
  ls.c.assign(std::size_t(spec.m2), Mat::Zero(spec.m1, spec.m1));
  for (int j = 0; j < spec.m2; ++j)
    ls.c[std::size_t(j)] = spec.B[std::size_t(j)].transpose();
  return ls;
}

// ---------------------------------------------------------------------------
// H-type

HTypeResult is_h_type(const GroupSpec& spec) {
  HTypeResult out;
  const Mat I = Mat::Identity(spec.m1, spec.m1);
  for (int i = 0; i < spec.m2; ++i)
    for (int j = i; j < spec.m2; ++j) {
      Mat R = spec.B[std::size_t(i)] * spec.B[std::size_t(j)] +
              spec.B[std::size_t(j)] * spec.B[std::size_t(i)];
      if (i == j) R += 2.0 * I;
      const double res = R.cwiseAbs().maxCoeff();
      if (res > 1e-12) {
        out.htype = false;
        out.i = i + 1;
        out.j = j + 1;
        out.residual = res;
        return out;
      }
    }
  out.htype = true;
  return out;
}

// ---------------------------------------------------------------------------
// Plentifulness

namespace {

Vec pencil_matrix_vec(const GroupSpec& spec, const Vec& lambda, Mat& S) {
  S = Mat::Zero(spec.m1, spec.m1);
  for (int j = 0; j < spec.m2; ++j) S += lambda[j] * spec.B[std::size_t(j)];
  return lambda;
}

// singular values of sum lambda_j B^j, descending
Vec pencil_singular_values(const GroupSpec& spec, const Vec& lambda) {
  Mat S;
  pencil_matrix_vec(spec, lambda, S);
  Eigen::JacobiSVD<Mat> svd(S);
  return svd.singularValues();
}

int numeric_rank(const Vec& sv, double rel_tol = 1e-9) {
  if (sv.size() == 0) return 0;
  const double thresh = rel_tol * sv[0];
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++r;
  return r;
}

// Unit vector in the image of the rank-2 skew matrix S (the witness
// hyperplane is v-perp).
std::optional<Vec> image_direction(const Mat& S) {
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeThinU);
  if (svd.singularValues()[0] <= 0.0) return std::nullopt;
  return Vec(svd.matrixU().col(0));
}

// Pfaffian of the 4x4 principal minor of S on rows/cols {a,b,c,d}.
double pfaffian4(const Mat& S, int a, int b, int c, int d) {
  return S(a, b) * S(c, d) - S(a, c) * S(b, d) + S(a, d) * S(b, c);
}

struct Quad { double c0, c1, c2; };  // c0 + c1 mu + c2 mu^2

// Pfaffian minors of B1 + mu B2 as quadratics in mu.
std::vector<Quad> pencil_pfaffians(const Mat& B1, const Mat& B2) {
  const int m = int(B1.rows());
  std::vector<Quad> out;
  auto pf_mixed = [&](int a, int b, int c, int d) {
    return B1(a, b) * B2(c, d) + B2(a, b) * B1(c, d) - B1(a, c) * B2(b, d) -
           B2(a, c) * B1(b, d) + B1(a, d) * B2(b, c) + B2(a, d) * B1(b, c);
  };
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c)
        for (int d = c + 1; d < m; ++d)
          out.push_back({pfaffian4(B1, a, b, c, d), pf_mixed(a, b, c, d),
                         pfaffian4(B2, a, b, c, d)});
  return out;
}

void fill_rank2_witness(const GroupSpec& spec, const Vec& lambda,
                        ClassificationReport& rep) {
  Mat S;
  pencil_matrix_vec(spec, lambda, S);
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeThinU);
  rep.plentiful = Verdict::No;
  rep.witness_lambda = lambda / lambda.norm();
  rep.witness_v = Vec(svd.matrixU().col(0));
  rep.min_pencil_rank = numeric_rank(svd.singularValues());
  rep.sigma3_min = svd.singularValues().size() > 2 ? svd.singularValues()[2] : 0.0;
  rep.sigma_ratio =
      svd.singularValues()[0] > 0 ? rep.sigma3_min / svd.singularValues()[0] : 0.0;
}

// Exact decision for m2 = 2: a nonzero lambda with rank <= 2 exists iff the
// quadratic Pfaffian system has a common real projective root.
void plentiful_pencil_m2_2(const GroupSpec& spec, ClassificationReport& rep) {
  const Mat& B1 = spec.B[0];
  const Mat& B2 = spec.B[1];
  rep.mode = "exact";

  if (spec.m1 <= 3) {
    // no 4x4 minors: every pencil member has rank <= 2
    fill_rank2_witness(spec, Vec::Unit(2, 0), rep);
    return;
  }

  const std::vector<Quad> quads = pencil_pfaffians(B1, B2);
  const double scale1 = B1.cwiseAbs().maxCoeff();
  const double scale2 = B2.cwiseAbs().maxCoeff();
  const double qscale = std::max({scale1 * scale1, scale1 * scale2,
                                  scale2 * scale2, 1e-300});
  const double tol = 1e-9 * qscale;

  // pivot: the minor with the largest coefficient magnitude
  int pivot = -1;
  double pivot_size = tol;
  for (std::size_t m = 0; m < quads.size(); ++m) {
    const double sz = std::max({std::abs(quads[m].c0), std::abs(quads[m].c1),
                                std::abs(quads[m].c2)});
    if (sz > pivot_size) {
      pivot_size = sz;
      pivot = int(m);
    }
  }
  if (pivot < 0) {
    // all minors vanish identically: every lambda gives rank <= 2
    fill_rank2_witness(spec, Vec::Unit(2, 0), rep);
    return;
  }

  auto eval = [](const Quad& q, double mu) {
    return q.c0 + mu * (q.c1 + mu * q.c2);
  };
  auto common_root = [&](double mu) {
    for (const Quad& q : quads) {
      const double s = std::max(1.0, mu * mu);
      if (std::abs(eval(q, mu)) > tol * s) return false;
    }
    return true;
  };

  std::vector<double> candidates;
  {
    const Quad& q = quads[std::size_t(pivot)];
    if (std::abs(q.c2) > tol) {
      const double disc = q.c1 * q.c1 - 4.0 * q.c2 * q.c0;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // numerically stable quadratic roots
        const double qq = -0.5 * (q.c1 + (q.c1 >= 0 ? sq : -sq));
        candidates.push_back(qq / q.c2);
        if (qq != 0.0) candidates.push_back(q.c0 / qq);
        else candidates.push_back(0.0);
      }
    } else if (std::abs(q.c1) > tol) {
      candidates.push_back(-q.c0 / q.c1);
    }
    // else pivot is (numerically) constant nonzero: no root in this chart
  }
  for (double mu : candidates) {
    if (!std::isfinite(mu)) continue;
    if (common_root(mu)) {
      Vec lambda(2);
      lambda << 1.0, mu;
      fill_rank2_witness(spec, lambda, rep);
      return;
    }
  }
  // chart at infinity: lambda = (0,1), i.e. rank(B2) <= 2
  {
    bool inf_root = true;
    for (const Quad& q : quads)
      if (std::abs(q.c2) > tol) { inf_root = false; break; }
    if (inf_root) {
      fill_rank2_witness(spec, Vec::Unit(2, 1), rep);
      return;
    }
  }
  rep.plentiful = Verdict::Yes;
  Vec sv = pencil_singular_values(spec, Vec::Unit(2, 0));
  rep.min_pencil_rank = numeric_rank(sv);
}

// Numeric scan for m2 >= 3: seeded multi-start minimization of
// sigma_3(sum lambda_j B^j) over the unit lambda-sphere.
void plentiful_numeric(const GroupSpec& spec, std::uint64_t seed,
                       ClassificationReport& rep) {
  rep.mode = "certified-numeric";
  const int m2 = spec.m2;
  const int restarts = 48;

  auto sigma3 = [&](const Vec& lambda) {
    Vec sv = pencil_singular_values(spec, lambda);
    return sv.size() > 2 ? sv[2] : 0.0;
  };

  struct Best { double value; int restart; Vec lambda; };
  std::vector<Best> results(restarts);
  parallel_for(restarts, [&](std::int64_t r) {
    Rng rng(Rng::mix(seed, 0x706c656eULL + std::uint64_t(r)));
    Vec lambda = rng.unit_vector(m2);
    double value = sigma3(lambda);
    double step = 0.5;
    // tangent-space coordinate search with shrinking step
    while (step > 1e-12) {
      bool improved = false;
      for (int dir = 0; dir < 2 * m2; ++dir) {
        Vec cand = lambda;
        cand[dir / 2] += (dir % 2 ? -step : step);
        cand.normalize();
        const double v = sigma3(cand);
        if (v < value) {
          value = v;
          lambda = cand;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    results[std::size_t(r)] = {value, int(r), lambda};
  });
  // deterministic reduction: smallest value, ties by restart index
  Best best = results[0];
  for (const Best& b : results)
    if (b.value < best.value || (b.value == best.value && b.restart < best.restart))
      best = b;

  Vec sv = pencil_singular_values(spec, best.lambda);
  rep.sigma3_min = best.value;
  rep.sigma_ratio = sv[0] > 0 ? best.value / sv[0] : 0.0;
  rep.min_pencil_rank = numeric_rank(sv);
  if (sv[0] > 0 && best.value < 1e-9 * sv[0]) {
    fill_rank2_witness(spec, best.lambda, rep);
  } else {
    rep.plentiful = Verdict::Uncertain;  // leaning yes; minimum reported
  }
}

}  // namespace

ClassificationReport is_plentiful(const GroupSpec& spec, std::uint64_t seed) {
  ClassificationReport rep;
  HTypeResult ht = is_h_type(spec);
  rep.htype = ht.htype;
  rep.htype_i = ht.i;
  rep.htype_j = ht.j;
  rep.htype_residual = ht.residual;

  if (spec.m2 == 1) {
    rep.mode = "exact";
    Vec sv = pencil_singular_values(spec, Vec::Ones(1));
    rep.min_pencil_rank = numeric_rank(sv);
    if (rep.min_pencil_rank >= 4) {
      rep.plentiful = Verdict::Yes;
    } else {
      fill_rank2_witness(spec, Vec::Ones(1), rep);
    }
    return rep;
  }
  if (spec.m2 == 2) {
    plentiful_pencil_m2_2(spec, rep);
    return rep;
  }

  // m2 >= 3: the H-type identity, when it holds, settles the verdict
  // (an H-type group is plentiful unless it is H^1, which has m2 = 1).
  if (ht.htype) {
    rep.mode = "exact";
    rep.plentiful = Verdict::Yes;
    Vec sv = pencil_singular_values(spec, Vec::Unit(spec.m2, 0));
    rep.min_pencil_rank = numeric_rank(sv);
    rep.sigma3_min = sv.size() > 2 ? sv[2] : 0.0;
    rep.sigma_ratio = sv[0] > 0 ? rep.sigma3_min / sv[0] : 0.0;
    return rep;
  }
  plentiful_numeric(spec, seed, rep);
  return rep;
}

OracleResult plentiful_bruteforce_oracle(const GroupSpec& spec,
                                         int n_subspaces, std::uint64_t seed,
                                         const std::vector<Vec>& extra_v) {
  OracleResult out;
  out.worst_rank = spec.m2;
  const int m1 = spec.m1;
  const int m2 = spec.m2;
  const int nb = m1 - 1;
  const int pairs = nb * (nb - 1) / 2;

  auto hyperplane_rank = [&](const Vec& v) {
    // orthonormal basis of v-perp via a Householder reflection sending v to e1
    Mat H = Mat::Identity(m1, m1);
    Vec u = v / v.norm();
    Vec w = u - Vec::Unit(m1, 0);
    const double wn2 = w.squaredNorm();
    if (wn2 > 1e-24) H -= (2.0 / wn2) * (w * w.transpose());
    // rows 2..m1 of H span v-perp
    Mat C(m2, std::max(pairs, 1));
    C.setZero();
    int col = 0;
    for (int a = 1; a < m1; ++a)
      for (int b = a + 1; b < m1; ++b, ++col)
        for (int j = 0; j < m2; ++j)
          C(j, col) = (spec.B[std::size_t(j)] * H.row(a).transpose())
                          .dot(H.row(b).transpose());
    if (pairs == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(C);
    return numeric_rank(svd.singularValues());
  };

  for (const Vec& v : extra_v) {
    const int r = hyperplane_rank(v);
    out.worst_rank = std::min(out.worst_rank, r);
    if (r < m2 && !out.witness_v) {
      out.plentiful_evidence = false;
      out.witness_v = v / v.norm();
    }
  }
  if (!out.plentiful_evidence) return out;

  std::vector<int> ranks(std::size_t(n_subspaces), m2);
  std::vector<Vec> vs(std::size_t(n_subspaces));
  parallel_for(n_subspaces, [&](std::int64_t i) {
    Rng rng(Rng::mix(seed, 0x6f7261636cULL + std::uint64_t(i)));
    Vec v = rng.unit_vector(m1);
    vs[std::size_t(i)] = v;
    ranks[std::size_t(i)] = hyperplane_rank(v);
  });
  for (int i = 0; i < n_subspaces; ++i) {
    out.worst_rank = std::min(out.worst_rank, ranks[std::size_t(i)]);
    if (ranks[std::size_t(i)] < m2) {
      out.plentiful_evidence = false;
      out.witness_v = vs[std::size_t(i)];
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

GroupSpec spec_from_brackets(int m1, int m2,
                             const std::vector<std::array<double, 4>>& brackets,
                             const std::string& name) {
  std::ostringstream os;
  os << "m1 " << m1 << "\nm2 " << m2 << "\n";
  for (const auto& b : brackets)
    os << "bracket " << int(b[0]) << " " << int(b[1]) << " " << int(b[2]) << " "
       << b[3] << "\n";
  return to_group_spec(parse_lie_spec(os.str()), name);
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> cat;

  auto add = [&](const std::string& key, const std::string& desc, GroupSpec spec,
                 Verdict plentiful, bool htype) {
    CatalogEntry e;
    e.key = key;
    e.description = desc;
    e.spec = std::move(spec);
    e.expected_plentiful = plentiful;
    e.expected_htype = htype;
    cat.push_back(std::move(e));
  };

  add("h1", "first Heisenberg group",
      spec_from_brackets(2, 1, {{1, 2, 1, 1}}, "h1"), Verdict::No, true);
  add("h2", "second Heisenberg group",
      spec_from_brackets(4, 1, {{1, 2, 1, 1}, {3, 4, 1, 1}}, "h2"),
      Verdict::Yes, true);
  add("h3", "third Heisenberg group",
      spec_from_brackets(6, 1, {{1, 2, 1, 1}, {3, 4, 1, 1}, {5, 6, 1, 1}}, "h3"),
      Verdict::Yes, true);
  add("g752", "G_{7,5,2}: dimension 7, rank 5, step 2",
      spec_from_brackets(5, 2,
                         {{1, 2, 1, 1}, {3, 4, 1, 1}, {1, 5, 2, 1}, {2, 3, 2, 1}},
                         "g752"),
      Verdict::Yes, false);
  add("f32", "free step-2 group on 3 generators",
      spec_from_brackets(3, 3, {{1, 2, 1, 1}, {1, 3, 2, 1}, {2, 3, 3, 1}}, "f32"),
      Verdict::No, false);
  add("quat", "quaternionic H-type group (m1=4, m2=3)",
      spec_from_brackets(4, 3,
                         {{1, 2, 1, 1},
                          {3, 4, 1, 1},
                          {1, 3, 2, 1},
                          {2, 4, 2, -1},
                          {1, 4, 3, 1},
                          {2, 3, 3, 1}},
                         "quat"),
      Verdict::Yes, true);
  add("h1xr", "H^1 x R (abelian horizontal factor)",
      spec_from_brackets(3, 1, {{1, 2, 1, 1}}, "h1xr"), Verdict::No, false);
  return cat;
}

}  // namespace

const std::vector<CatalogEntry>& builtin_catalog() {
  static const std::vector<CatalogEntry> cat = build_catalog();
  return cat;
}

const CatalogEntry* find_builtin(const std::string& key) {
  for (const CatalogEntry& e : builtin_catalog())
    if (e.key == key) return &e;
  return nullptr;
}

}  // namespace carnot
