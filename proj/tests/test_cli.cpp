// End-to-end checks of the installed command line.  The binary path
// comes from the build system.
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef RELAYDP_CLI_PATH
#define RELAYDP_CLI_PATH "relaydp"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string dir = (std::filesystem::temp_directory_path() / "relaydp_cli_test").string();
    std::filesystem::create_directories(dir);
    const std::string out_file = dir + "/stdout.txt";
    const std::string cmd = std::string(RELAYDP_CLI_PATH) + " " + args + " >" + out_file + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = raw == -1 ? -1 : WEXITSTATUS(raw);
    std::ifstream is(out_file);
    std::stringstream ss;
    ss << is.rdbuf();
    r.out = ss.str();
    return r;
}

std::string tmp(const char* name) {
    const std::string dir = (std::filesystem::temp_directory_path() / "relaydp_cli_test").string();
    std::filesystem::create_directories(dir);
    return dir + "/" + name;
}

} // namespace

TEST_CASE("cli: missing required rate exits 1 with usage text") {
    const RunResult r = run("solve --slots 2 --seed 1 --out /dev/null");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("--rate") != std::string::npos);
}

TEST_CASE("cli: solve then evaluate round trip") {
    const std::string pol = tmp("pol.bin");
    const RunResult s = run("solve --slots 2 --rate 1.0 --trunc 1e-3 --delta 0.01 --nsim 1000 "
                            "--seed 42 --out " +
                            pol);
    CHECK(s.exit_code == 0);
    CHECK(s.out.find("K=2 R=1") != std::string::npos);
    CHECK(s.out.find("NMESE=") != std::string::npos);
    CHECK(s.out.find("relay=on") != std::string::npos);
    CHECK(std::filesystem::exists(pol));
    CHECK(std::filesystem::exists(pol + ".config.json")); // resolved-config echo

    const RunResult e = run("evaluate --table " + pol + " --trials 5000 --seed 7");
    CHECK(e.exit_code == 0);
    CHECK(e.out.find("policy=dp") != std::string::npos);

    // Same command, same seed: identical report (bit reproducibility).
    const RunResult e2 = run("evaluate --table " + pol + " --trials 5000 --seed 7");
    CHECK(e2.out == e.out);
}

TEST_CASE("cli: switched-off relay is reported") {
    const std::string pol = tmp("pol_norelay.bin");
    const RunResult s = run("solve --slots 2 --rate 0.5 --gsr 0 --trunc 1e-3 --nsim 500 --seed 3 "
                            "--out " +
                            pol);
    CHECK(s.exit_code == 0);
    CHECK(s.out.find("relay=off") != std::string::npos);
}

TEST_CASE("cli: sweep writes the documented CSV header and an SVG") {
    const std::string csv = tmp("sweep.csv");
    const std::string svg = tmp("sweep.svg");
    const RunResult r = run("sweep --rates 0.5,1.0 --slots-list 2 --policies heuristic,naive "
                            "--trunc 1e-3 --nsim 200 --seed 5 --eval-seed 6 --trials 2000 --out " +
                            csv + " --svg " + svg);
    CHECK(r.exit_code == 0);
    std::ifstream is(csv);
    std::string header;
    std::getline(is, header);
    CHECK(header == "rate,K,policy,trunc,nmese,nmese_db,stderr,trials,seed");
    int rows = 0;
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
    CHECK(std::filesystem::exists(svg));
    CHECK(std::filesystem::exists(csv + ".config.json"));
}

TEST_CASE("cli: bounds verdicts for the fading classes") {
    RunResult r = run("bounds --dist rayleigh");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("no_relay: UNBOUNDED") != std::string::npos);
    CHECK(r.out.find("relay:    BOUNDED") != std::string::npos);

    r = run("bounds --dist chi2 --dof 4 --lambda 0");
    CHECK(r.out.find("no_relay: BOUNDED") != std::string::npos);

    r = run("bounds --dist rician --lambda 2 --json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"no_relay\": \"UNBOUNDED\"") != std::string::npos);
    CHECK(r.out.find("\"relay\": \"BOUNDED\"") != std::string::npos);
}

TEST_CASE("cli: io failure exits 2") {
    const RunResult r = run("evaluate --table /nonexistent_table.bin --seed 1");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: numerical failure exits 3") {
    // Every trajectory of the naive scheme aborts without a
    // source-relay link.
    const RunResult r = run("evaluate --policy naive --slots 2 --rate 0.5 --gsr 0 --trunc 1e-3 "
                            "--trials 200 --seed 1");
    CHECK(r.exit_code == 3);
}

TEST_CASE("cli: flags override config-file keys override defaults") {
    const std::string cfgfile = tmp("bounds.cfg");
    {
        std::ofstream os(cfgfile);
        os << "bounds.dist=chi2\n";
        os << "bounds.dof=4\n";
        os << "bounds.lambda=0\n";
    }
    // File selects the chi-squared class (bounded without a relay)...
    RunResult r = run("bounds --config " + cfgfile);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("no_relay: BOUNDED") != std::string::npos);
    // ...and a flag overrides the file back to Rayleigh.
    r = run("bounds --config " + cfgfile + " --dist rayleigh");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("no_relay: UNBOUNDED") != std::string::npos);
}
