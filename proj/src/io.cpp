#include "carnot/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace carnot {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_writable(const std::string& path, bool force) {
  if (!force && std::filesystem::exists(path))
    throw ValidationError("refusing to overwrite existing file (use --force): " +
                          path);
}

namespace {

json spec_to_json(const GroupSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["m1"] = spec.m1;
  j["m2"] = spec.m2;
  json B = json::array();
  for (const Mat& Bj : spec.B) {
    json rows = json::array();
    for (int r = 0; r < Bj.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < Bj.cols(); ++c) row.push_back(Bj(r, c));
      rows.push_back(row);
    }
    B.push_back(rows);
  }
  j["B"] = B;
  j["eps2"] = spec.eps2;
  return j;
}

GroupSpec spec_from_json(const json& j) {
  if (!j.contains("m1") || !j.contains("m2") || !j.contains("B"))
    throw ParseError("group spec: missing m1, m2 or B");
  const int m1 = j.at("m1").get<int>();
  const int m2 = j.at("m2").get<int>();
  std::vector<Mat> B;
  for (const json& rows : j.at("B")) {
    Mat Bj(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (int(rows[r].size()) != Bj.cols())
        throw ParseError("group spec: ragged B matrix");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        Bj(int(r), int(c)) = rows[r][c].get<double>();
    }
    B.push_back(std::move(Bj));
  }
  std::optional<double> eps2;
  if (j.contains("eps2") && !j.at("eps2").is_null())
    eps2 = j.at("eps2").get<double>();
  const std::string name = j.value("name", "");
  return make_group_spec(m1, m2, std::move(B), eps2, name);
}

json parse_header(std::istream& in, std::string* first_data_line) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(1);
      try {
        return json::parse(body);
      } catch (const json::exception& e) {
        throw ParseError(std::string("malformed '#' JSON header: ") + e.what(),
                         1, 2);
      }
    }
    *first_data_line = line;
    return json();
  }
  return json();
}

Splitting splitting_from_header(const json& hdr) {
  GroupSpec spec = spec_from_json(hdr.at("group"));
  Vec nu(spec.m1);
  const json& jnu = hdr.at("nu");
  if (int(jnu.size()) != spec.m1)
    throw ParseError("header: nu dimension does not match m1");
  for (int i = 0; i < spec.m1; ++i) nu[i] = jnu[std::size_t(i)].get<double>();
  return make_splitting(spec, nu);
}

json splitting_to_header(const Splitting& split) {
  json j;
  j["group"] = spec_to_json(split.spec);
  json nu = json::array();
  for (int i = 0; i < split.spec.m1; ++i) nu.push_back(split.nu[i]);
  j["nu"] = nu;
  return j;
}

}  // namespace

GroupSpec read_group_spec_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open group spec file: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("group spec JSON: ") + e.what());
  }
  return spec_from_json(j);
}

void write_group_spec_json(const GroupSpec& spec, const std::string& path,
                           bool force) {
  ensure_writable(path, force);
  std::ofstream f(path);
  f << spec_to_json(spec).dump(2) << "\n";
}

GroupSpec load_group(const std::string& source) {
  if (const CatalogEntry* e = find_builtin(source)) return e->spec;
  if (!std::filesystem::exists(source))
    throw ParseError("unknown builtin group and no such file: " + source);
  if (source.size() > 5 && source.substr(source.size() - 5) == ".json")
    return read_group_spec_json(source);
  return to_group_spec(read_lie_spec_file(source), source);
}

SampleSet read_samples_csv(const std::string& path, const Splitting& split) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open sample file: " + path);
  const int d = split.wdim();
  std::vector<Vec> ws;
  std::vector<double> phis;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> cols;
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        cols.push_back(std::stod(cell));
      } catch (...) {
        throw ParseError("sample file: bad number '" + cell + "'", lineno, 1);
      }
    }
    if (int(cols.size()) != d + 1) {
      std::ostringstream os;
      os << "sample file: expected " << d + 1 << " columns, got " << cols.size();
      throw ParseError(os.str(), lineno, 1);
    }
    Vec w(d);
    for (int a = 0; a < d; ++a) w[a] = cols[std::size_t(a)];
    ws.push_back(w);
    phis.push_back(cols[std::size_t(d)]);
  }
  return make_sample_set(split, std::move(ws), std::move(phis));
}

void write_samples_csv(const SampleSet& samples, const std::string& path,
                       bool force) {
  ensure_writable(path, force);
  std::ofstream f(path);
  json hdr = splitting_to_header(samples.split);
  hdr["kind"] = "samples";
  f << "# " << hdr.dump() << "\n";
  for (std::size_t i = 0; i < samples.w.size(); ++i) {
    for (int a = 0; a < samples.w[i].size(); ++a)
      f << fmt_double(samples.w[i][a]) << ",";
    f << fmt_double(samples.phi[i]) << "\n";
  }
}

void write_graph_file(const SampledGraph& graph, const std::string& path,
                      bool force, const std::string& meta_json) {
  ensure_writable(path, force);
  std::ofstream f(path);
  json hdr = splitting_to_header(graph.split);
  hdr["kind"] = "graph";
  json lo = json::array(), hi = json::array(), dims = json::array();
  for (int a = 0; a < graph.grid.d(); ++a) {
    lo.push_back(graph.grid.lo[a]);
    hi.push_back(graph.grid.hi[a]);
    dims.push_back(graph.grid.dims[std::size_t(a)]);
  }
  hdr["lo"] = lo;
  hdr["hi"] = hi;
  hdr["dims"] = dims;
  if (!meta_json.empty()) hdr["meta"] = json::parse(meta_json);
  f << "# " << hdr.dump() << "\n";
  for (double v : graph.values) f << fmt_double(v) << "\n";
}

SampledGraph read_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open graph file: " + path);
  std::string first;
  json hdr = parse_header(f, &first);
  if (hdr.is_null() || !hdr.contains("dims"))
    throw ParseError("graph file: missing '#' JSON header with dims");
  Splitting split = splitting_from_header(hdr);
  GridBox grid;
  const json& lo = hdr.at("lo");
  const json& hi = hdr.at("hi");
  const json& dims = hdr.at("dims");
  const int d = int(dims.size());
  grid.lo = Vec(d);
  grid.hi = Vec(d);
  grid.dims.resize(std::size_t(d));
  for (int a = 0; a < d; ++a) {
    grid.lo[a] = lo[std::size_t(a)].get<double>();
    grid.hi[a] = hi[std::size_t(a)].get<double>();
    grid.dims[std::size_t(a)] = dims[std::size_t(a)].get<int>();
  }
  std::vector<double> values;
  values.reserve(std::size_t(grid.nodes()));
  std::string line = first;
  int lineno = 1;
  do {
    if (line.empty() || line[0] == '#') continue;
    try {
      values.push_back(std::stod(line));
    } catch (...) {
      throw ParseError("graph file: bad value '" + line + "'", lineno, 1);
    }
  } while (++lineno, std::getline(f, line));
  if (std::int64_t(values.size()) != grid.nodes()) {
    std::ostringstream os;
    os << "graph file: expected " << grid.nodes() << " values, got "
       << values.size();
    throw ParseError(os.str());
  }
  return make_graph(split, grid, std::move(values));
}

void write_extension_file(const ExtensionField& field, const std::string& path,
                          bool force) {
  json meta;
  meta["kind"] = "extension";
  meta["L"] = field.L_in;
  meta["alpha"] = field.alpha;
  meta["beta"] = field.beta;
  meta["gamma"] = field.gamma;
  meta["lip_bound"] = field.lip_bound;
  meta["sup_phi"] = field.sup_phi;
  meta["clamped_hi"] = field.clamped_hi;
  meta["clamped_lo"] = field.clamped_lo;
  write_graph_file(graph_from_extension(field), path, force, meta.dump());
}

void write_excess_csv(const ExcessReport& report, const std::string& path,
                      bool force, const std::string& config_json) {
  ensure_writable(path, force);
  std::ofstream f(path);
  if (!config_json.empty()) f << "# " << config_json << "\n";
  f << "r,excess_half,excess_sq\n";
  for (std::size_t i = 0; i < report.radii.size(); ++i)
    f << fmt_double(report.radii[i]) << "," << fmt_double(report.excess_half[i])
      << "," << fmt_double(report.excess_sq[i]) << "\n";
}

void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::string& path, bool force,
                     const std::string& config_json) {
  ensure_writable(path, force);
  std::ofstream f(path);
  if (!config_json.empty()) f << "# " << config_json << "\n";
  f << "iter,energy,grad_norm,step\n";
  for (const TraceRow& row : trace)
    f << row.iter << "," << fmt_double(row.energy) << ","
      << fmt_double(row.grad_norm) << "," << fmt_double(row.step) << "\n";
}

std::string classification_report_json(const GroupSpec& spec,
                                       const ClassificationReport& rep) {
  json j;
  j["group"] = spec.name;
  j["m1"] = spec.m1;
  j["m2"] = spec.m2;
  j["plentiful"] = to_string(rep.plentiful);
  j["htype"] = rep.htype;
  j["mode"] = rep.mode;
  j["min_pencil_rank"] = rep.min_pencil_rank;
  j["sigma3_min"] = rep.sigma3_min;
  j["sigma_ratio"] = rep.sigma_ratio;
  if (rep.witness_lambda) {
    json l = json::array();
    for (int i = 0; i < rep.witness_lambda->size(); ++i)
      l.push_back((*rep.witness_lambda)[i]);
    j["witness_lambda"] = l;
  }
  if (rep.witness_v) {
    json v = json::array();
    for (int i = 0; i < rep.witness_v->size(); ++i)
      v.push_back((*rep.witness_v)[i]);
    j["witness_v"] = v;
  }
  if (!rep.htype) {
    j["htype_violation"] = {{"i", rep.htype_i},
                            {"j", rep.htype_j},
                            {"residual", rep.htype_residual}};
  }
  return j.dump(2);
}

}  // namespace carnot
