#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "cspfolio/csv.hpp"
#include "cspfolio/dpll.hpp"
#include "cspfolio/harness.hpp"

// End-to-end smoke of the installed binary. CSPFOLIO_BIN is injected by CMake.

using namespace cspfolio;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(CSPFOLIO_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "cspfolio_XXXXXX").string();
        path = mkdtemp(tmpl.data());
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("binary: encode happy path") {
    TempDir dir;
    write_file(dir.file("a.csp"), "var X 1 2\nvar Y 1 2\nforbid X Y : 1 2\n");
    CHECK(run("encode " + dir.file("a.csp") + " --out " + dir.file("a.cnf") +
              " --encoding support") == 0);
    const CnfFormula f = parse_dimacs(read_file(dir.file("a.cnf")));
    CHECK(f.clauses.size() == 8);
    CHECK(count_models(f, 1000) == 3);
}

TEST_CASE("binary: selftest subcommand") {
    CHECK(run("selftest --count 25 --seed 3") == 0);
    CHECK(run("selftest --count 25 --seed 3 --mutant drop-amo") == 1);
}

TEST_CASE("binary: usage errors exit nonzero") {
    CHECK(run("") != 0);
    CHECK(run("encode") != 0);
    CHECK(run("features --manifest nope.csv") != 0); // missing required --out
}
