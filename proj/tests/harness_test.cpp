#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cspfolio/csv.hpp"
#include "cspfolio/dpll.hpp"
#include "cspfolio/harness.hpp"
#include "cspfolio/native.hpp"
#include "test_support.hpp"

using namespace cspfolio;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "cspfolio_XXXXXX").string();
        path = mkdtemp(tmpl.data());
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

const char* kNativeA = "var X 1 2\nvar Y 1 2\nforbid X Y : 1 2\n";
const char* kNativeB = "var X 1 3\nvar Y 1 3\nrel X < Y\n";

std::string count_lines(const std::string& path) {
    std::ifstream in(path);
    std::string line, all;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return std::to_string(n);
}

} // namespace

TEST_CASE("manifest parses and round-trips") {
    const std::vector<ManifestEntry> entries = {
        {"a.csp", InstanceFormat::Native, "fam1"},
        {"b.xml", InstanceFormat::Xcsp, "fam2"},
        {"c.cnf", InstanceFormat::Dimacs, "fam1"},
    };
    const auto back = parse_manifest(write_manifest(entries));
    REQUIRE(back.size() == 3);
    CHECK(back[1].format == InstanceFormat::Xcsp);
    CHECK(back[2].family == "fam1");
    CHECK_THROWS(parse_manifest("nope\n"));
    CHECK_THROWS(parse_manifest("path,format,family\nx,weird,f\n"));
    CHECK_THROWS(parse_manifest("path,format,family\nx,native,\n"));
}

TEST_CASE("cmd_encode writes DIMACS and a summary") {
    TempDir dir;
    write_file(dir.file("a.csp"), kNativeA);
    EncodeOptions opt;
    opt.input = dir.file("a.csp");
    opt.output = dir.file("a.cnf");
    opt.config = {Encoding::Direct, true};
    std::ostringstream err;
    CHECK(cmd_encode(opt, err) == 0);
    const CnfFormula f = parse_dimacs(read_file(dir.file("a.cnf")));
    CHECK(f.num_vars == 4);
    CHECK(f.clauses.size() == 5);
    CHECK(count_models(f, 1000) == 3);
    CHECK(err.str().find("4 vars, 5 clauses") != std::string::npos);

    SUBCASE("ND variant maps through") {
        opt.config.include_domains = false;
        std::ostringstream err2;
        CHECK(cmd_encode(opt, err2) == 0);
        CHECK(parse_dimacs(read_file(dir.file("a.cnf"))).clauses.size() == 1);
    }
}

TEST_CASE("cmd_encode rejects unsupported constraints with exit 2") {
    TempDir dir;
    write_file(dir.file("bad.xml"), R"(<instance>
      <domains><domain name="D" nbValues="2">1..2</domain></domains>
      <variables><variable name="A" domain="D"/><variable name="B" domain="D"/></variables>
      <constraints><constraint name="C" arity="2" scope="A B" reference="global:allDifferent"/></constraints>
    </instance>)");
    EncodeOptions opt;
    opt.input = dir.file("bad.xml");
    opt.output = dir.file("bad.cnf");
    std::ostringstream err;
    CHECK(cmd_encode(opt, err) == 2);
    CHECK(err.str().find("global:allDifferent") != std::string::npos);

    opt.input = dir.file("missing.csp");
    std::ostringstream err2;
    CHECK(cmd_encode(opt, err2) == 2);
}

TEST_CASE("cmd_features writes schema-stable CSVs with error markers") {
    TempDir dir;
    write_file(dir.file("a.csp"), kNativeA);
    write_file(dir.file("b.csp"), kNativeB);
    write_file(dir.file("broken.csp"), "var X 2 1\n");
    std::vector<ManifestEntry> entries = {
        {dir.file("a.csp"), InstanceFormat::Native, "f1"},
        {dir.file("b.csp"), InstanceFormat::Native, "f2"},
        {dir.file("broken.csp"), InstanceFormat::Native, "f1"},
    };
    write_file(dir.file("manifest.csv"), write_manifest(entries));

    FeaturesOptions opt;
    opt.manifest_path = dir.file("manifest.csv");
    opt.out = dir.file("feat.csv");
    opt.sat = true;
    opt.config = {Encoding::Order, false};
    opt.probe_budget = 50;
    std::ostringstream err;
    REQUIRE(cmd_features(opt, err) == 0);

    const FeatureTable table = parse_feature_csv(read_file(dir.file("feat.csv")));
    CHECK(table.schema == sat_feature_schema());
    CHECK(table.instances == std::vector<std::string>{dir.file("a.csp"), dir.file("b.csp")});
    CHECK(table.error_instances == std::vector<std::string>{dir.file("broken.csp")});
    CHECK(err.str().find("broken.csp") != std::string::npos);

    const auto overheads = parse_overhead_csv(read_file(dir.file("feat_overhead.csv")));
    CHECK(overheads.size() == 2);

    SUBCASE("feature CSV bytes are reproducible") {
        const std::string first = read_file(dir.file("feat.csv"));
        std::ostringstream err2;
        REQUIRE(cmd_features(opt, err2) == 0);
        CHECK(read_file(dir.file("feat.csv")) == first);
    }
    SUBCASE("csp kind emits the 24-feature schema") {
        opt.sat = false;
        opt.out = dir.file("csp.csv");
        std::ostringstream err2;
        REQUIRE(cmd_features(opt, err2) == 0);
        CHECK(parse_feature_csv(read_file(dir.file("csp.csv"))).schema == csp_feature_schema());
    }
    SUBCASE("parallel jobs give identical feature bytes") {
        const std::string serial = read_file(dir.file("feat.csv"));
        opt.jobs = 4;
        std::ostringstream err2;
        REQUIRE(cmd_features(opt, err2) == 0);
        CHECK(read_file(dir.file("feat.csv")) == serial);
    }
}

TEST_CASE("cmd_features --encoding all produces the seven-variant sweep") {
    TempDir dir;
    write_file(dir.file("a.csp"), kNativeA);
    write_file(dir.file("manifest.csv"),
               write_manifest({{dir.file("a.csp"), InstanceFormat::Native, "f"}}));
    FeaturesOptions opt;
    opt.manifest_path = dir.file("manifest.csv");
    opt.out = dir.file("feat.csv");
    opt.sweep_all = true;
    opt.probe_budget = 20;
    std::ostringstream err;
    REQUIRE(cmd_features(opt, err) == 0);
    for (const char* variant :
         {"csp", "direct", "direct_nd", "order", "order_nd", "support", "support_nd"}) {
        const std::string path = dir.file(std::string("feat_") + variant + ".csv");
        CAPTURE(path);
        CHECK(std::filesystem::exists(path));
        CHECK(std::filesystem::exists(dir.file(std::string("feat_") + variant + "_overhead.csv")));
    }
    const auto csp_table = parse_feature_csv(read_file(dir.file("feat_csp.csv")));
    CHECK(csp_table.schema == csp_feature_schema());
    const auto sat_table = parse_feature_csv(read_file(dir.file("feat_support_nd.csv")));
    CHECK(sat_table.schema == sat_feature_schema());
}

TEST_CASE("cmd_features fails cleanly when every row fails") {
    TempDir dir;
    write_file(dir.file("broken.csp"), "var X 2 1\n");
    write_file(dir.file("manifest.csv"),
               write_manifest({{dir.file("broken.csp"), InstanceFormat::Native, "f"}}));
    FeaturesOptions opt;
    opt.manifest_path = dir.file("manifest.csv");
    opt.out = dir.file("feat.csv");
    std::ostringstream err;
    CHECK(cmd_features(opt, err) == 2);
}

TEST_CASE("overhead CSV round-trips") {
    const std::vector<OverheadRow> rows = {{"a", 0.5, 1.25}, {"b", 0, 0.125}};
    const auto back = parse_overhead_csv(write_overhead_csv(rows));
    REQUIRE(back.size() == 2);
    CHECK(back[0].encode_s == 0.5);
    CHECK(back[1].feature_s == 0.125);
    CHECK_THROWS(parse_overhead_csv("bad\n"));
}

TEST_CASE("cmd_run_solvers statuses, storage convention, and resume") {
    TempDir dir;
    write_file(dir.file("a.csp"), kNativeA);
    write_file(dir.file("b.csp"), kNativeB);
    write_file(dir.file("manifest.csv"),
               write_manifest({{dir.file("a.csp"), InstanceFormat::Native, "f"},
                               {dir.file("b.csp"), InstanceFormat::Native, "f"}}));

    RunSolversOptions opt;
    opt.manifest_path = dir.file("manifest.csv");
    opt.out = dir.file("runtimes.csv");
    opt.timeout = 0.3;
    opt.grace = 0.2;
    opt.solvers = {
        {"ok", "echo {instance} >> " + dir.file("ran_ok.txt")},
        {"slow", "echo {instance} >> " + dir.file("ran_slow.txt") + " && sleep 5"},
    };
    std::ostringstream err;
    REQUIRE(cmd_run_solvers(opt, err) == 0);

    const RuntimeMatrix m = parse_runtime_csv(read_file(dir.file("runtimes.csv")), opt.timeout);
    REQUIRE(m.instances.size() == 2);
    REQUIRE(m.solvers == std::vector<std::string>{"ok", "slow"});
    for (const auto& row : m.runtimes) {
        CHECK(row[0] < 0.3);
        CHECK(row[1] == 0.3); // timeout stored as exactly the timeout value
    }
    CHECK(count_lines(dir.file("ran_ok.txt")) == "2");
    CHECK(count_lines(dir.file("ran_slow.txt")) == "2");

    SUBCASE("resume skips completed pairs") {
        // drop the final CSV and one journal record, then rerun
        const std::string journal = dir.file("runtimes.csv") + ".records.csv";
        const auto rows = parse_csv(read_file(journal));
        REQUIRE(rows.size() == 5); // header + 4 records
        std::string truncated;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            for (std::size_t c = 0; c < rows[i].size(); ++c)
                truncated += (c ? "," : "") + rows[i][c];
            truncated += '\n';
        }
        write_file(journal, truncated);
        std::filesystem::remove(dir.file("runtimes.csv"));

        std::ostringstream err2;
        REQUIRE(cmd_run_solvers(opt, err2) == 0);
        CHECK(err2.str().find("ran 1 pairs") != std::string::npos);
        const RuntimeMatrix again =
            parse_runtime_csv(read_file(dir.file("runtimes.csv")), opt.timeout);
        CHECK(again.instances == m.instances);
        CHECK(again.solvers == m.solvers);
        // three cells kept their journaled values; only one pair re-executed
        int reruns = 0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t s = 0; s < 2; ++s)
                if (again.runtimes[i][s] != m.runtimes[i][s]) ++reruns;
        CHECK(reruns <= 1);
    }
}

TEST_CASE("cmd_run_solvers scores crashes as timeouts with error status") {
    TempDir dir;
    write_file(dir.file("a.csp"), kNativeA);
    write_file(dir.file("manifest.csv"),
               write_manifest({{dir.file("a.csp"), InstanceFormat::Native, "f"}}));
    RunSolversOptions opt;
    opt.manifest_path = dir.file("manifest.csv");
    opt.out = dir.file("runtimes.csv");
    opt.timeout = 5;
    opt.solvers = {{"crash", "test -f {instance} && exit 3"}};
    std::ostringstream err;
    REQUIRE(cmd_run_solvers(opt, err) == 0);
    const RuntimeMatrix m = parse_runtime_csv(read_file(dir.file("runtimes.csv")), opt.timeout);
    CHECK(m.runtimes[0][0] == 5.0);
    const auto journal = parse_csv(read_file(dir.file("runtimes.csv") + ".records.csv"));
    REQUIRE(journal.size() == 2);
    CHECK(journal[1][3] == "error");
    CHECK(err.str().find("1 error") != std::string::npos);
}

TEST_CASE("cmd_run_solvers validates its inputs") {
    TempDir dir;
    write_file(dir.file("manifest.csv"), "path,format,family\nmissing.csp,native,f\n");
    RunSolversOptions opt;
    opt.manifest_path = dir.file("manifest.csv");
    opt.out = dir.file("r.csv");
    opt.solvers = {{"ok", "echo {instance}"}};
    std::ostringstream err;
    CHECK(cmd_run_solvers(opt, err) == 2); // manifest path does not exist

    write_file(dir.file("a.csp"), kNativeA);
    write_file(dir.file("manifest.csv"),
               write_manifest({{dir.file("a.csp"), InstanceFormat::Native, "f"}}));
    opt.solvers = {{"bad", "echo no placeholder"}};
    std::ostringstream err2;
    CHECK(cmd_run_solvers(opt, err2) == 2);
    CHECK(err2.str().find("{instance}") != std::string::npos);
}

namespace {

// Small two-family fixture on disk for cmd_evaluate.
struct EvalFixture {
    TempDir dir;
    EvaluateOptions opt;

    explicit EvalFixture(int per_family = 6) {
        FeatureTable features;
        features.schema = {"f"};
        RuntimeMatrix runtimes;
        runtimes.solvers = {"A", "B"};
        runtimes.timeout = 100;
        std::vector<ManifestEntry> entries;
        for (int i = 0; i < per_family; ++i) {
            const std::string id1 = "one_" + std::to_string(i);
            features.instances.push_back(id1);
            features.rows.push_back({0.0 + 0.01 * i});
            runtimes.instances.push_back(id1);
            runtimes.runtimes.push_back({1.0, 60.0});
            entries.push_back({id1, InstanceFormat::Native, "one"});
            const std::string id2 = "two_" + std::to_string(i);
            features.instances.push_back(id2);
            features.rows.push_back({10.0 + 0.01 * i});
            runtimes.instances.push_back(id2);
            runtimes.runtimes.push_back({60.0, 1.0});
            entries.push_back({id2, InstanceFormat::Native, "two"});
        }
        write_file(dir.file("features.csv"), write_feature_csv(features));
        write_file(dir.file("runtimes.csv"), write_runtime_csv(runtimes));
        write_file(dir.file("manifest.csv"), write_manifest(entries));
        opt.features_csv = dir.file("features.csv");
        opt.runtimes_csv = dir.file("runtimes.csv");
        opt.manifest_path = dir.file("manifest.csv");
        opt.timeout = 100;
        opt.folds = 3;
        opt.config.min_cluster_size = 3;
        opt.config.max_k = 4;
        opt.config.seed = 9;
    }
};

} // namespace

TEST_CASE("cmd_evaluate renders the four-row report deterministically") {
    EvalFixture fx;
    fx.opt.report_out = fx.dir.file("report.txt");
    fx.opt.model_out = fx.dir.file("model.json");
    std::ostringstream out, err;
    REQUIRE(cmd_evaluate(fx.opt, out, err) == 0);
    const std::string report = out.str();
    for (const char* row : {"VBS", "Portfolio", "Random Cluster", "Best Single"})
        CHECK(report.find(row) != std::string::npos);
    CHECK(report.find("PAR10") != std::string::npos);
    CHECK(read_file(fx.dir.file("report.txt")) == report);

    const PortfolioModel model = model_from_json(read_file(fx.dir.file("model.json")));
    CHECK(model.k >= 2);

    std::ostringstream out2, err2;
    REQUIRE(cmd_evaluate(fx.opt, out2, err2) == 0);
    CHECK(out2.str() == report);
}

TEST_CASE("cmd_evaluate reports id mismatches explicitly") {
    EvalFixture fx;
    FeatureTable extra;
    extra.schema = {"f"};
    extra.instances = {"ghost"};
    extra.rows = {{1.0}};
    std::ofstream(fx.dir.file("features.csv"), std::ios::app)
        << "ghost,1\n"; // append an instance the runtime CSV lacks
    std::ostringstream out, err;
    CHECK(cmd_evaluate(fx.opt, out, err) == 2);
    CHECK(err.str().find("only in features: ghost") != std::string::npos);
}

TEST_CASE("cmd_evaluate falls back to a single family without labels") {
    EvalFixture fx;
    fx.opt.manifest_path.clear();
    std::ostringstream out, err;
    REQUIRE(cmd_evaluate(fx.opt, out, err) == 0);
    CHECK(err.str().find("one family") != std::string::npos);
}

TEST_CASE("overhead application caps at the timeout and never helps") {
    EvalFixture fx;
    // runtime 60 plus overhead 50 crosses the timeout of 100
    std::vector<OverheadRow> rows;
    for (int i = 0; i < 6; ++i) {
        rows.push_back({"one_" + std::to_string(i), 25.0, 25.0});
        rows.push_back({"two_" + std::to_string(i), 25.0, 25.0});
    }
    write_file(fx.dir.file("overhead.csv"), write_overhead_csv(rows));

    std::ostringstream plain_out, err1;
    REQUIRE(cmd_evaluate(fx.opt, plain_out, err1) == 0);
    fx.opt.overhead_csv = fx.dir.file("overhead.csv");
    std::ostringstream loaded_out, err2;
    REQUIRE(cmd_evaluate(fx.opt, loaded_out, err2) == 0);

    auto parse_row = [](const std::string& report, const std::string& name) {
        const auto pos = report.find(name);
        REQUIRE(pos != std::string::npos);
        std::istringstream rest(report.substr(pos + name.size()));
        double par = 0;
        int solved = 0;
        rest >> par >> solved;
        return std::make_pair(par, solved);
    };
    const auto [plain_par, plain_solved] = parse_row(plain_out.str(), "Portfolio");
    const auto [loaded_par, loaded_solved] = parse_row(loaded_out.str(), "Portfolio");
    CHECK(loaded_par >= plain_par);
    CHECK(loaded_solved <= plain_solved);
    CHECK(loaded_out.str().find("overhead: encode+feature") != std::string::npos);
}

TEST_CASE("cmd_selftest passes clean and catches the injected mutant") {
    SelftestOptions opt;
    opt.count = 40;
    opt.seed = 7;
    std::ostringstream out;
    CHECK(cmd_selftest(opt, out) == 0);
    CHECK(out.str().find("40/40 bijection checks passed") != std::string::npos);

    std::ostringstream out_seeded;
    CHECK(cmd_selftest(opt, out_seeded) == 0);
    CHECK(out_seeded.str() == out.str()); // seed fixes the corpus

    opt.mutant = EncoderMutant::DropAmo;
    std::ostringstream out2;
    CHECK(cmd_selftest(opt, out2) == 1);
    CHECK(out2.str().find("FAIL") != std::string::npos);
}
