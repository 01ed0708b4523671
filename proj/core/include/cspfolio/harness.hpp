#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cspfolio/encode.hpp"
#include "cspfolio/portfolio.hpp"

namespace cspfolio {

enum class InstanceFormat { Native, Xcsp, Dimacs };

std::string_view to_string(InstanceFormat f);
std::optional<InstanceFormat> parse_format(std::string_view s);

struct ManifestEntry {
    std::string path;
    InstanceFormat format = InstanceFormat::Native;
    std::string family;
};

// CSV with header "path,format,family". Family labels must be non-empty.
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::string write_manifest(const std::vector<ManifestEntry>& entries);

// Reads and checks every entry: the path must exist and parse under its
// declared format. Throws on the first violation.
std::vector<ManifestEntry> load_manifest_checked(const std::string& path);

// .xml / .xcsp extension or a leading '<' means XCSP; everything else native.
InstanceFormat guess_csp_format(const std::string& path, std::string_view content);

// Parses a CSP file (native or XCSP) and returns the normalized instance,
// named after the path.
CspInstance load_csp_instance(const std::string& path, InstanceFormat format);

// ---- subcommand backends; each returns a process exit code ----

struct EncodeOptions {
    std::string input;
    std::string output;
    EncodingConfig config;
};

// Writes DIMACS and a one-line summary (vars, clauses, wall time) on err.
// Exit 2 on parse or unsupported-constraint failure.
int cmd_encode(const EncodeOptions& opt, std::ostream& err);

struct FeaturesOptions {
    std::string manifest_path;
    std::string out;           // CSV path; with sweep_all, the stem for 7 CSVs
    bool sweep_all = false;    // CSP features + all six SAT encoding variants
    bool sat = true;           // feature kind when not sweeping
    EncodingConfig config;     // SAT encoding when kind is sat
    std::uint64_t probe_budget = 500;
    int jobs = 1;
};

// Writes the feature CSV(s) plus an "<out stem>_overhead.csv" sidecar with
// per-instance encode/feature wall seconds. Per-instance failures become
// "<id>,ERROR" rows; exit 0 while at least one row succeeded.
int cmd_features(const FeaturesOptions& opt, std::ostream& err);

// Overhead sidecar IO ("instance,encode_s,feature_s").
struct OverheadRow {
    std::string instance;
    double encode_s = 0;
    double feature_s = 0;
};
std::string write_overhead_csv(const std::vector<OverheadRow>& rows);
std::vector<OverheadRow> parse_overhead_csv(std::string_view text);

struct SolverSpec {
    std::string id;
    std::string command; // shell template containing the {instance} placeholder
};

struct RunSolversOptions {
    std::string manifest_path;
    std::vector<SolverSpec> solvers;
    double timeout = 3600;
    double grace = 2.0;
    std::string out; // runtime CSV; the journal lives at out + ".records.csv"
    int jobs = 1;
};

// Runs every (instance, solver) pair under the wall-clock timeout, appending
// one journal record per completion so an interrupted run resumes by skipping
// finished pairs. Crashed solvers score as the timeout value with a distinct
// "error" status in the journal.
int cmd_run_solvers(const RunSolversOptions& opt, std::ostream& err);

struct EvaluateOptions {
    std::string features_csv;
    std::string runtimes_csv;
    std::string overhead_csv;  // optional
    std::string manifest_path; // optional family-label source
    int folds = 10;
    double timeout = 3600;
    PortfolioConfig config;
    std::string report_out; // optional copy of the report
    std::string model_out;  // optional: model trained on the full data set
};

// Stratified cross-validation; prints the Table-style report on out.
// Exit 2 on instance-id mismatches between the CSVs (listed on err).
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err);

struct SelftestOptions {
    int count = 200; // total bijection checks, random + pigeonhole + coloring
    std::uint64_t seed = 424242;
    EncoderMutant mutant = EncoderMutant::None;
};

// Encoding-bijection oracle suite: model count of every full encoding must
// equal the brute-force solution count. Nonzero exit on any mismatch.
int cmd_selftest(const SelftestOptions& opt, std::ostream& out);

} // namespace cspfolio
