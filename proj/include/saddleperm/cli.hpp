#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "saddleperm/linalg.hpp"

namespace saddleperm::cli {

struct RunConfig {
    enum class Command { KSample, TwoSample, Table1, Table2Style, Table3Style };
    enum class Format { Text, Csv, Json };

    Command command = Command::KSample;
    std::string input_path;
    bool use_ranks = true;      // --scores rank|raw (k-sample only)
    Vec u_grid;                 // empty: observed-statistic mode
    long sphere_samples = 1000; // --sphere-samples / --M
    long mc_reps = -1;          // -1: per-command default
    std::uint64_t seed = 1;
    Format format = Format::Text;
    std::string output_path;    // empty: stdout
    int workers = 1;
};

// Parsed dataset: `groups` holds indices into `group_labels` (first-appearance
// order); scalar data fills `values`, vector data fills `rows`.
struct Dataset {
    std::vector<int> groups;
    std::vector<std::string> group_labels;
    Vec values;
    std::vector<Vec> rows;
    bool multivariate = false;
};

// CSV ingestion. K-sample files have header `group,value`; two-sample files
// have header `group,v1,...,vl`. Throws MalformedCsv (with line number) or
// MixedArity.
Dataset parse_input(const std::string& path, RunConfig::Command command);

// Execute a configuration, writing the report to `out` and a machine-readable
// JSON error object to `err` on failure. Returns the process exit status:
// 0 success, 2 invalid configuration, 3 malformed input, 4 numeric failure.
// Tables are fully assembled before anything is written.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace saddleperm::cli
