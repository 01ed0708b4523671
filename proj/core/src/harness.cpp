#include "cspfolio/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cspfolio/csv.hpp"
#include "cspfolio/dpll.hpp"
#include "cspfolio/generators.hpp"
#include "cspfolio/native.hpp"
#include "cspfolio/process.hpp"
#include "cspfolio/rng.hpp"
#include "cspfolio/xcsp.hpp"

namespace cspfolio {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

std::string_view to_string(InstanceFormat f) {
    switch (f) {
    case InstanceFormat::Native: return "native";
    case InstanceFormat::Xcsp: return "xcsp";
    case InstanceFormat::Dimacs: return "dimacs";
    }
    return "?";
}

std::optional<InstanceFormat> parse_format(std::string_view s) {
    if (s == "native") return InstanceFormat::Native;
    if (s == "xcsp") return InstanceFormat::Xcsp;
    if (s == "dimacs") return InstanceFormat::Dimacs;
    return std::nullopt;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0] != std::vector<std::string>{"path", "format", "family"})
        throw std::runtime_error("manifest: missing 'path,format,family' header");
    std::vector<ManifestEntry> entries;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3)
            throw std::runtime_error("manifest: row " + std::to_string(r + 1) + " needs 3 cells");
        const auto fmt = parse_format(rows[r][1]);
        if (!fmt) throw std::runtime_error("manifest: unknown format '" + rows[r][1] + "'");
        if (rows[r][2].empty())
            throw std::runtime_error("manifest: empty family label for '" + rows[r][0] + "'");
        entries.push_back(ManifestEntry{rows[r][0], *fmt, rows[r][2]});
    }
    return entries;
}

std::string write_manifest(const std::vector<ManifestEntry>& entries) {
    std::string out = "path,format,family\n";
    for (const auto& e : entries) {
        out += e.path;
        out += ',';
        out += to_string(e.format);
        out += ',';
        out += e.family;
        out += '\n';
    }
    return out;
}

std::vector<ManifestEntry> load_manifest_checked(const std::string& path) {
    auto entries = parse_manifest(read_file(path));
    for (const auto& e : entries) {
        try {
            const std::string content = read_file(e.path);
            switch (e.format) {
            case InstanceFormat::Native: parse_native(content, e.path); break;
            case InstanceFormat::Xcsp: parse_xcsp(content, e.path); break;
            case InstanceFormat::Dimacs: parse_dimacs(content); break;
            }
        } catch (const std::exception& ex) {
            throw std::runtime_error("manifest entry '" + e.path + "': " + ex.what());
        }
    }
    return entries;
}

InstanceFormat guess_csp_format(const std::string& path, std::string_view content) {
    if (path.ends_with(".xml") || path.ends_with(".xcsp")) return InstanceFormat::Xcsp;
    const auto first = content.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && content[first] == '<') return InstanceFormat::Xcsp;
    return InstanceFormat::Native;
}

CspInstance load_csp_instance(const std::string& path, InstanceFormat format) {
    const std::string content = read_file(path);
    switch (format) {
    case InstanceFormat::Native: return normalize(parse_native(content, path));
    case InstanceFormat::Xcsp: return normalize(parse_xcsp(content, path));
    case InstanceFormat::Dimacs: break;
    }
    throw std::runtime_error("'" + path + "' is DIMACS, not a CSP instance");
}

// ---- encode ------------------------------------------------------------------

int cmd_encode(const EncodeOptions& opt, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    try {
        const std::string content = read_file(opt.input);
        if (opt.input.ends_with(".cnf") || opt.input.ends_with(".dimacs"))
            throw CspError("input '" + opt.input + "' is already DIMACS");
        const InstanceFormat fmt = guess_csp_format(opt.input, content);
        const CspInstance inst = normalize(fmt == InstanceFormat::Xcsp
                                               ? parse_xcsp(content, opt.input)
                                               : parse_native(content, opt.input));
        const CnfFormula f = encode(inst, opt.config);
        write_file(opt.output, write_dimacs(f));
        char line[160];
        std::snprintf(line, sizeof line, "%s: %d vars, %zu clauses, %.1f ms\n",
                      opt.config.variant_name().c_str(), f.num_vars, f.clauses.size(),
                      seconds_since(start) * 1e3);
        err << line;
        return 0;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 2;
    }
}

// ---- features ----------------------------------------------------------------

namespace {

struct ParsedEntry {
    std::optional<CspInstance> csp; // normalized
    std::optional<CnfFormula> dimacs;
    std::string error;
    double parse_seconds = 0;
};

std::vector<ParsedEntry> parse_entries(const std::vector<ManifestEntry>& entries, int jobs) {
    std::vector<ParsedEntry> parsed(entries.size());
    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        try {
            if (entries[i].format == InstanceFormat::Dimacs)
                parsed[i].dimacs = parse_dimacs(read_file(entries[i].path));
            else
                parsed[i].csp = load_csp_instance(entries[i].path, entries[i].format);
        } catch (const std::exception& ex) {
            parsed[i].error = ex.what();
        }
        parsed[i].parse_seconds = seconds_since(start);
    });
    return parsed;
}

struct VariantResult {
    FeatureTable table;
    std::vector<OverheadRow> overheads;
    std::vector<std::pair<std::string, std::string>> failures; // (instance, message)
};

// config == nullopt means CSP features.
VariantResult compute_variant(const std::vector<ManifestEntry>& entries,
                              const std::vector<ParsedEntry>& parsed,
                              const std::optional<EncodingConfig>& config,
                              std::uint64_t probe_budget, int jobs) {
    struct Slot {
        std::optional<std::vector<double>> row;
        std::string error;
        OverheadRow overhead;
    };
    std::vector<Slot> slots(entries.size());

    parallel_for(entries.size(), jobs, [&](std::size_t i) {
        Slot& slot = slots[i];
        slot.overhead.instance = entries[i].path;
        if (!parsed[i].error.empty()) {
            slot.error = parsed[i].error;
            return;
        }
        try {
            if (!config) {
                if (!parsed[i].csp)
                    throw std::runtime_error("CSP features need a CSP instance, got DIMACS");
                const auto start = std::chrono::steady_clock::now();
                slot.row = csp_features(*parsed[i].csp, probe_budget);
                slot.overhead.feature_s = seconds_since(start);
            } else {
                CnfFormula formula;
                if (parsed[i].dimacs) {
                    formula = *parsed[i].dimacs;
                    slot.overhead.encode_s = parsed[i].parse_seconds;
                } else {
                    const auto start = std::chrono::steady_clock::now();
                    formula = encode(*parsed[i].csp, *config);
                    slot.overhead.encode_s = parsed[i].parse_seconds + seconds_since(start);
                }
                const auto start = std::chrono::steady_clock::now();
                slot.row = sat_features(formula, probe_budget);
                slot.overhead.feature_s = seconds_since(start);
            }
        } catch (const std::exception& ex) {
            slot.error = ex.what();
        }
    });

    VariantResult out;
    out.table.schema = config ? sat_feature_schema() : csp_feature_schema();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (slots[i].row) {
            out.table.instances.push_back(entries[i].path);
            out.table.rows.push_back(std::move(*slots[i].row));
            out.overheads.push_back(slots[i].overhead);
        } else {
            out.table.error_instances.push_back(entries[i].path);
            out.failures.emplace_back(entries[i].path, slots[i].error);
        }
    }
    return out;
}

std::string with_variant(const std::string& out, const std::string& variant) {
    if (out.ends_with(".csv"))
        return out.substr(0, out.size() - 4) + "_" + variant + ".csv";
    return out + "_" + variant + ".csv";
}

std::string overhead_path(const std::string& csv_path) {
    if (csv_path.ends_with(".csv")) return csv_path.substr(0, csv_path.size() - 4) + "_overhead.csv";
    return csv_path + "_overhead.csv";
}

} // namespace

std::string write_overhead_csv(const std::vector<OverheadRow>& rows) {
    std::string out = "instance,encode_s,feature_s\n";
    for (const auto& r : rows) {
        out += r.instance;
        out += ',';
        out += format_double(r.encode_s);
        out += ',';
        out += format_double(r.feature_s);
        out += '\n';
    }
    return out;
}

std::vector<OverheadRow> parse_overhead_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0] != std::vector<std::string>{"instance", "encode_s", "feature_s"})
        throw std::runtime_error("overhead CSV: missing 'instance,encode_s,feature_s' header");
    std::vector<OverheadRow> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3)
            throw std::runtime_error("overhead CSV: row " + std::to_string(r + 1) + " needs 3 cells");
        OverheadRow row;
        row.instance = rows[r][0];
        char* end = nullptr;
        row.encode_s = std::strtod(rows[r][1].c_str(), &end);
        if (end != rows[r][1].c_str() + rows[r][1].size())
            throw std::runtime_error("overhead CSV: bad number '" + rows[r][1] + "'");
        row.feature_s = std::strtod(rows[r][2].c_str(), &end);
        if (end != rows[r][2].c_str() + rows[r][2].size())
            throw std::runtime_error("overhead CSV: bad number '" + rows[r][2] + "'");
        out.push_back(std::move(row));
    }
    return out;
}

int cmd_features(const FeaturesOptions& opt, std::ostream& err) {
    try {
        const auto entries = parse_manifest(read_file(opt.manifest_path));
        if (entries.empty()) {
            err << "error: manifest lists no instances\n";
            return 2;
        }
        const auto parsed = parse_entries(entries, opt.jobs);

        struct Job {
            std::string variant;
            std::optional<EncodingConfig> config;
        };
        std::vector<Job> jobs;
        if (opt.sweep_all) {
            jobs.push_back({"csp", std::nullopt});
            for (const auto& cfg : all_encoding_configs()) jobs.push_back({cfg.variant_name(), cfg});
        } else if (opt.sat) {
            jobs.push_back({opt.config.variant_name(), opt.config});
        } else {
            jobs.push_back({"csp", std::nullopt});
        }

        std::size_t succeeded = 0, failed = 0;
        for (const auto& job : jobs) {
            const VariantResult res =
                compute_variant(entries, parsed, job.config, opt.probe_budget, opt.jobs);
            const std::string csv_path =
                jobs.size() > 1 ? with_variant(opt.out, job.variant) : opt.out;
            write_file(csv_path, write_feature_csv(res.table));
            write_file(overhead_path(csv_path), write_overhead_csv(res.overheads));
            succeeded += res.table.instances.size();
            failed += res.failures.size();
            for (const auto& [instance, message] : res.failures)
                err << job.variant << ": " << instance << ": " << message << '\n';
            err << job.variant << ": " << res.table.instances.size() << " rows ("
                << res.failures.size() << " failed) -> " << csv_path << '\n';
        }
        if (succeeded == 0) {
            err << "error: every instance failed feature extraction\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 2;
    }
}

// ---- run-solvers ---------------------------------------------------------------

namespace {

struct RunKey {
    std::string instance;
    std::string solver;
    bool operator<(const RunKey& o) const {
        return instance != o.instance ? instance < o.instance : solver < o.solver;
    }
};

struct RunOutcome {
    double runtime = 0;
    std::string status; // solved | timeout | error
};

std::string substitute_instance(const std::string& command, const std::string& path) {
    const std::string placeholder = "{instance}";
    std::string out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = command.find(placeholder, start);
        if (pos == std::string::npos) {
            out += command.substr(start);
            return out;
        }
        out += command.substr(start, pos - start);
        out += path;
        start = pos + placeholder.size();
    }
}

} // namespace

int cmd_run_solvers(const RunSolversOptions& opt, std::ostream& err) {
    try {
        if (opt.solvers.empty()) throw std::runtime_error("no solvers given");
        if (opt.timeout <= 0) throw std::runtime_error("timeout must be positive");
        {
            std::set<std::string> ids;
            for (const auto& s : opt.solvers) {
                if (!ids.insert(s.id).second)
                    throw std::runtime_error("duplicate solver id '" + s.id + "'");
                if (s.command.find("{instance}") == std::string::npos)
                    throw std::runtime_error("solver '" + s.id +
                                             "' template lacks the {instance} placeholder");
            }
        }
        const auto entries = load_manifest_checked(opt.manifest_path);
        if (entries.empty()) throw std::runtime_error("manifest lists no instances");

        const std::string journal_path = opt.out + ".records.csv";
        std::map<RunKey, RunOutcome> done;
        {
            std::ifstream probe(journal_path);
            if (probe) {
                std::ostringstream buf;
                buf << probe.rdbuf();
                const auto rows = parse_csv(buf.str());
                for (std::size_t r = 1; r < rows.size(); ++r) {
                    if (rows[r].size() != 4) continue; // torn tail record from a crash
                    done[RunKey{rows[r][0], rows[r][1]}] =
                        RunOutcome{std::strtod(rows[r][2].c_str(), nullptr), rows[r][3]};
                }
            }
        }

        struct Task {
            std::size_t entry;
            std::size_t solver;
        };
        std::vector<Task> tasks;
        for (std::size_t e = 0; e < entries.size(); ++e)
            for (std::size_t s = 0; s < opt.solvers.size(); ++s)
                if (!done.count(RunKey{entries[e].path, opt.solvers[s].id}))
                    tasks.push_back(Task{e, s});

        std::ofstream journal(journal_path, std::ios::app);
        if (!journal) throw std::runtime_error("cannot open journal '" + journal_path + "'");
        if (done.empty()) {
            journal << "instance,solver,runtime,status\n";
            journal.flush();
        }

        std::mutex sink_mutex;
        parallel_for(tasks.size(), opt.jobs, [&](std::size_t t) {
            const auto& entry = entries[tasks[t].entry];
            const auto& solver = opt.solvers[tasks[t].solver];
            RunOutcome outcome;
            try {
                const ProcessResult pr = run_shell_with_timeout(
                    substitute_instance(solver.command, entry.path), opt.timeout, opt.grace);
                if (pr.timed_out || pr.seconds >= opt.timeout) {
                    outcome = {opt.timeout, "timeout"};
                } else if (!pr.signaled && (pr.exit_code == 0 || pr.exit_code == 10 || pr.exit_code == 20)) {
                    outcome = {pr.seconds, "solved"};
                } else {
                    outcome = {opt.timeout, "error"}; // crash scores as a timeout
                }
            } catch (const std::exception&) {
                outcome = {opt.timeout, "error"};
            }
            std::lock_guard<std::mutex> lock(sink_mutex);
            done[RunKey{entry.path, solver.id}] = outcome;
            journal << entry.path << ',' << solver.id << ',' << format_double(outcome.runtime)
                    << ',' << outcome.status << '\n';
            journal.flush();
        });

        RuntimeMatrix m;
        m.timeout = opt.timeout;
        for (const auto& s : opt.solvers) m.solvers.push_back(s.id);
        std::size_t solved = 0, timeouts = 0, errors = 0;
        for (const auto& e : entries) {
            std::vector<double> row;
            for (const auto& s : opt.solvers) {
                const auto& outcome = done.at(RunKey{e.path, s.id});
                row.push_back(outcome.runtime);
                if (outcome.status == "solved")
                    ++solved;
                else if (outcome.status == "timeout")
                    ++timeouts;
                else
                    ++errors;
            }
            m.instances.push_back(e.path);
            m.runtimes.push_back(std::move(row));
        }
        m.clamp_to_timeout();
        write_file(opt.out, write_runtime_csv(m));
        err << "ran " << tasks.size() << " pairs (" << done.size() << " total): " << solved
            << " solved, " << timeouts << " timeout, " << errors << " error -> " << opt.out << '\n';
        return 0;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 2;
    }
}

// ---- evaluate ------------------------------------------------------------------

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const FeatureTable features = parse_feature_csv(read_file(opt.features_csv));
        const RuntimeMatrix runtimes = parse_runtime_csv(read_file(opt.runtimes_csv), opt.timeout);

        std::set<std::string> feat_ids(features.instances.begin(), features.instances.end());
        std::set<std::string> run_ids(runtimes.instances.begin(), runtimes.instances.end());
        if (feat_ids != run_ids) {
            err << "error: feature and runtime instance sets differ\n";
            for (const auto& id : feat_ids)
                if (!run_ids.count(id)) err << "  only in features: " << id << '\n';
            for (const auto& id : run_ids)
                if (!feat_ids.count(id)) err << "  only in runtimes: " << id << '\n';
            return 2;
        }
        for (const auto& id : features.error_instances)
            err << "warning: skipping failed feature row for " << id << '\n';

        std::map<std::string, std::string> family_of;
        if (opt.manifest_path.empty()) {
            err << "warning: no family labels supplied; treating all instances as one family\n";
            for (const auto& id : features.instances) family_of[id] = "all";
        } else {
            std::map<std::string, std::string> by_path;
            for (const auto& e : parse_manifest(read_file(opt.manifest_path)))
                by_path[e.path] = e.family;
            std::size_t unlabeled = 0;
            for (const auto& id : features.instances) {
                const auto it = by_path.find(id);
                if (it == by_path.end()) {
                    family_of[id] = "(unlabeled)";
                    ++unlabeled;
                } else {
                    family_of[id] = it->second;
                }
            }
            if (unlabeled > 0)
                err << "warning: " << unlabeled << " instances missing from the manifest labels\n";
        }

        std::map<std::string, double> overhead;
        const bool use_overhead = !opt.overhead_csv.empty();
        if (use_overhead)
            for (const auto& row : parse_overhead_csv(read_file(opt.overhead_csv)))
                overhead[row.instance] = row.encode_s + row.feature_s;

        const EvaluationReport report =
            cross_validate(features, runtimes, family_of, opt.folds, opt.config,
                           use_overhead ? &overhead : nullptr);
        const std::string text = render_report(report);
        out << text;
        if (!opt.report_out.empty()) write_file(opt.report_out, text);
        if (!opt.model_out.empty())
            write_file(opt.model_out, model_to_json(train(features, runtimes, opt.config)));
        return 0;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 2;
    }
}

// ---- selftest ------------------------------------------------------------------

int cmd_selftest(const SelftestOptions& opt, std::ostream& out) {
    const int fixed = 10; // 9 pigeonhole sizes + K3
    const int random_count = std::max(0, opt.count - fixed);

    std::vector<CspInstance> corpus;
    Rng rng(derive_seed(opt.seed, "selftest"));
    const double p1_grid[] = {0.25, 0.5, 0.75, 1.0};
    const double p2_grid[] = {0.125, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < random_count; ++i) {
        const int n = 2 + static_cast<int>(rng.next_below(3));
        const int d = 1 + static_cast<int>(rng.next_below(4));
        const double p1 = p1_grid[rng.next_below(4)];
        const double p2 = p2_grid[rng.next_below(5)];
        corpus.push_back(gen_random_binary(n, d, p1, p2, rng.next_u64()));
    }
    for (int p = 1; p <= 3; ++p)
        for (int h = 1; h <= 3; ++h) corpus.push_back(gen_pigeonhole(p, h));
    corpus.push_back(gen_coloring(3, {{0, 1}, {1, 2}, {0, 2}}, 3));

    int passed = 0;
    int printed = 0;
    for (const auto& raw : corpus) {
        const CspInstance inst = normalize(raw);
        const auto truth = count_solutions(inst, 1u << 20);
        bool ok = truth.has_value();
        if (!ok && printed < 10) {
            out << "FAIL " << raw.name << ": solution count exceeded the enumeration limit\n";
            ++printed;
        }
        for (const auto enc : {Encoding::Direct, Encoding::Support, Encoding::Order}) {
            if (!ok) break;
            const EncodingConfig cfg{enc, true};
            const CnfFormula f = enc == Encoding::Direct
                                     ? encode_mutant(inst, cfg, opt.mutant)
                                     : encode(inst, cfg);
            const auto models = count_models(f, std::uint64_t{1} << 24);
            if (!models || *models != *truth) {
                ok = false;
                if (printed < 10) {
                    out << "FAIL " << raw.name << " [" << to_string(enc) << "]: solutions=" << *truth
                        << " models=" << (models ? std::to_string(*models) : "exceeded") << '\n';
                    ++printed;
                }
            }
        }
        if (ok) ++passed;
    }
    out << passed << '/' << corpus.size() << " bijection checks passed\n";
    return passed == static_cast<int>(corpus.size()) ? 0 : 1;
}

} // namespace cspfolio
