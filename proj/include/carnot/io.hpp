#pragma once

#include <string>
#include <vector>

#include "carnot/classify.hpp"
#include "carnot/graphs.hpp"
#include "carnot/ilip.hpp"
#include "carnot/minlab.hpp"

namespace carnot {

// round-trip-exact decimal rendering used by every writer
std::string fmt_double(double v);

// Refuses to overwrite an existing file unless force is set.
void ensure_writable(const std::string& path, bool force);

// Group spec file: JSON with fields name, m1, m2, B (row-major nested
// arrays), optional eps2.
GroupSpec read_group_spec_json(const std::string& path);
void write_group_spec_json(const GroupSpec& spec, const std::string& path,
                           bool force);

// Group source: builtin catalog key, a .json group spec, or a Lie bracket
// listing (anything else).
GroupSpec load_group(const std::string& source);

// Sample-set file: optional '#' JSON header, then one CSV row per sample
// with the n-1 W-coordinates followed by the value.
SampleSet read_samples_csv(const std::string& path, const Splitting& split);
void write_samples_csv(const SampleSet& samples, const std::string& path,
                       bool force);

// Graph file: '#' JSON header (group, nu, box, dims, optional metadata) and
// a node-major value table, one value per line.
void write_graph_file(const SampledGraph& graph, const std::string& path,
                      bool force, const std::string& meta_json = "");
SampledGraph read_graph_file(const std::string& path);
void write_extension_file(const ExtensionField& field, const std::string& path,
                          bool force);

void write_excess_csv(const ExcessReport& report, const std::string& path,
                      bool force, const std::string& config_json);
void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::string& path, bool force,
                     const std::string& config_json);

std::string classification_report_json(const GroupSpec& spec,
                                       const ClassificationReport& rep);

}  // namespace carnot
