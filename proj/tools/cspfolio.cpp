#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cspfolio/harness.hpp"

namespace {

using namespace cspfolio;

EncodingConfig make_config(const std::string& encoding, bool no_domains) {
    const auto enc = parse_encoding(encoding);
    if (!enc) throw CLI::ValidationError("--encoding", "unknown encoding '" + encoding + "'");
    return EncodingConfig{*enc, !no_domains};
}

std::vector<SolverSpec> parse_solver_specs(const std::vector<std::string>& raw) {
    std::vector<SolverSpec> specs;
    for (const auto& s : raw) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
            throw CLI::ValidationError("--solver", "expected 'id=command with {instance}'");
        specs.push_back(SolverSpec{s.substr(0, eq), s.substr(eq + 1)});
    }
    return specs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSP-to-SAT encodings, instance features, and a clustering solver portfolio"};
    app.require_subcommand(1);

    // encode
    auto* encode_cmd = app.add_subcommand("encode", "translate a CSP instance to DIMACS CNF");
    std::string encode_input, encode_out, encode_encoding = "direct";
    bool encode_no_domains = false;
    encode_cmd->add_option("input", encode_input, "CSP instance (native or XCSP 2.1)")->required();
    encode_cmd->add_option("--out", encode_out, "output DIMACS path")->required();
    encode_cmd->add_option("--encoding", encode_encoding, "direct|support|order")
        ->default_val("direct");
    encode_cmd->add_flag("--no-domains", encode_no_domains, "omit the domain clauses (ND variant)");

    // features
    auto* features_cmd = app.add_subcommand("features", "extract feature CSVs from a manifest");
    std::string feat_manifest, feat_out, feat_kind = "sat", feat_encoding = "direct";
    bool feat_no_domains = false;
    std::uint64_t feat_budget = 500;
    int feat_jobs = 1;
    features_cmd->add_option("--manifest", feat_manifest, "manifest CSV (path,format,family)")
        ->required();
    features_cmd->add_option("--out", feat_out, "output CSV (stem when --encoding all)")->required();
    features_cmd->add_option("--kind", feat_kind, "csp|sat")->default_val("sat");
    features_cmd->add_option("--encoding", feat_encoding, "direct|support|order|all")
        ->default_val("direct");
    features_cmd->add_flag("--no-domains", feat_no_domains, "omit the domain clauses (ND variant)");
    features_cmd->add_option("--budget", feat_budget, "probing node budget (0 disables probing)")
        ->default_val(500);
    features_cmd->add_option("--jobs", feat_jobs, "parallel workers")->default_val(1);

    // run-solvers
    auto* run_cmd = app.add_subcommand("run-solvers", "run external solvers over a manifest");
    std::string run_manifest, run_out;
    std::vector<std::string> run_solvers;
    double run_timeout = 3600, run_grace = 2.0;
    int run_jobs = 1;
    run_cmd->add_option("--manifest", run_manifest, "manifest CSV")->required();
    run_cmd->add_option("--solver", run_solvers, "repeatable 'id=command {instance}'")->required();
    run_cmd->add_option("--timeout", run_timeout, "wall-clock seconds per run")->default_val(3600);
    run_cmd->add_option("--grace", run_grace, "seconds between SIGTERM and SIGKILL")
        ->default_val(2.0);
    run_cmd->add_option("--out", run_out, "runtime matrix CSV")->required();
    run_cmd->add_option("--jobs", run_jobs, "parallel workers")->default_val(1);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "cross-validated portfolio evaluation");
    EvaluateOptions eval;
    eval_cmd->add_option("--features", eval.features_csv, "feature CSV")->required();
    eval_cmd->add_option("--runtimes", eval.runtimes_csv, "runtime matrix CSV")->required();
    eval_cmd->add_option("--overhead", eval.overhead_csv, "overhead CSV (instance,encode_s,feature_s)");
    eval_cmd->add_option("--manifest", eval.manifest_path, "manifest CSV for family labels");
    eval_cmd->add_option("--timeout", eval.timeout, "timeout the runtime CSV was produced with")
        ->default_val(3600);
    eval_cmd->add_option("--par", eval.config.par_f, "PAR penalty factor")->default_val(10);
    eval_cmd->add_option("--folds", eval.folds, "cross-validation folds")->default_val(10);
    eval_cmd->add_option("--seed", eval.config.seed, "root seed")->default_val(0);
    eval_cmd->add_option("--min-cluster-size", eval.config.min_cluster_size,
                         "smallest acceptable cluster")
        ->default_val(8);
    eval_cmd->add_option("--max-k", eval.config.max_k, "cluster count ceiling")->default_val(16);
    eval_cmd->add_option("--report-out", eval.report_out, "also write the report here");
    eval_cmd->add_option("--model-out", eval.model_out,
                         "train on the full data set and write the model JSON here");

    // selftest
    auto* selftest_cmd = app.add_subcommand("selftest", "encoding-bijection oracle suite");
    SelftestOptions selftest;
    std::string mutant_name;
    selftest_cmd->add_option("--count", selftest.count, "number of bijection checks")
        ->default_val(200);
    selftest_cmd->add_option("--seed", selftest.seed, "corpus seed")->default_val(424242);
    selftest_cmd->add_option("--mutant", mutant_name, "fault injection for testing the suite")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (encode_cmd->parsed()) {
            EncodeOptions opt{encode_input, encode_out, make_config(encode_encoding, encode_no_domains)};
            return cmd_encode(opt, std::cerr);
        }
        if (features_cmd->parsed()) {
            FeaturesOptions opt;
            opt.manifest_path = feat_manifest;
            opt.out = feat_out;
            opt.probe_budget = feat_budget;
            opt.jobs = feat_jobs;
            if (feat_encoding == "all") {
                opt.sweep_all = true;
            } else if (feat_kind == "csp") {
                opt.sat = false;
            } else if (feat_kind == "sat") {
                opt.sat = true;
                opt.config = make_config(feat_encoding, feat_no_domains);
            } else {
                std::cerr << "error: --kind must be csp or sat\n";
                return 2;
            }
            return cmd_features(opt, std::cerr);
        }
        if (run_cmd->parsed()) {
            RunSolversOptions opt;
            opt.manifest_path = run_manifest;
            opt.solvers = parse_solver_specs(run_solvers);
            opt.timeout = run_timeout;
            opt.grace = run_grace;
            opt.out = run_out;
            opt.jobs = run_jobs;
            return cmd_run_solvers(opt, std::cerr);
        }
        if (eval_cmd->parsed()) return cmd_evaluate(eval, std::cout, std::cerr);
        if (selftest_cmd->parsed()) {
            if (mutant_name == "drop-amo")
                selftest.mutant = EncoderMutant::DropAmo;
            else if (!mutant_name.empty()) {
                std::cerr << "error: unknown mutant '" << mutant_name << "'\n";
                return 2;
            }
            return cmd_selftest(selftest, std::cout);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
