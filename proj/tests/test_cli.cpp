#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = TAILPROC_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::path("/tmp") / ("tailproc_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        kCli + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.stdout_text = slurp(out);
    r.stderr_text = slurp(err);
    return r;
}

fs::path write_config(const fs::path& dir, const json& cfg) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << cfg.dump(2);
    return p;
}

}  // namespace

TEST_CASE("help lists all subcommands") {
    const fs::path dir = fresh_dir("help");
    const RunResult r = run_cli("--help", dir);
    CHECK(r.exit_code == 0);
    for (const char* sub : {"validate", "simulate", "estimate", "extremogram", "variance",
                            "mc", "counterexample"}) {
        CHECK(r.stdout_text.find(sub) != std::string::npos);
    }
}

TEST_CASE("validate accepts a stable ar model") {
    const fs::path dir = fresh_dir("validate_ok");
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {0.7}}, {"alpha", 2.0}}}};
    const fs::path cp = write_config(dir, cfg);
    const RunResult r =
        run_cli("validate --config " + cp.string() + " --out " + dir.string(), dir);
    CHECK(r.exit_code == 0);
    const json report = json::parse(slurp(dir / "validation.json"));
    CHECK(report.at("accepted") == true);
    CHECK(report.at("spectral_radius").get<double>() == Catch::Approx(0.7));
}

TEST_CASE("validate rejects an explosive ar model with exit code 2") {
    const fs::path dir = fresh_dir("validate_bad");
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {1.2}}, {"alpha", 2.0}}}};
    const fs::path cp = write_config(dir, cfg);
    const RunResult r =
        run_cli("validate --config " + cp.string() + " --out " + dir.string(), dir);
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.find("spectral radius") != std::string::npos);
    const json report = json::parse(slurp(dir / "validation.json"));
    CHECK(report.at("accepted") == false);
}

TEST_CASE("simulate is deterministic for a fixed seed") {
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {0.5}}, {"alpha", 2.0},
                                 {"innovation", {{"dist", "pareto"}, {"alpha", 2.0}}}}},
                      {"n", 500},
                      {"seed", 42}};
    const fs::path d1 = fresh_dir("sim1");
    const fs::path d2 = fresh_dir("sim2");
    const fs::path c1 = write_config(d1, cfg);
    const fs::path c2 = write_config(d2, cfg);
    const RunResult r1 =
        run_cli("simulate --config " + c1.string() + " --out " + d1.string(), d1);
    const RunResult r2 =
        run_cli("simulate --config " + c2.string() + " --out " + d2.string(), d2);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    const std::string a = slurp(d1 / "path.csv");
    const std::string b = slurp(d2 / "path.csv");
    REQUIRE(!a.empty());
    CHECK(a == b);
    CHECK(a.rfind("index,value\n", 0) == 0);
}

TEST_CASE("seed flag changes the simulated path") {
    const json cfg = {{"model", {{"model", "renewal"}, {"beta", 3.0}}},
                      {"n", 200},
                      {"seed", 1}};
    const fs::path d1 = fresh_dir("seed1");
    const fs::path d2 = fresh_dir("seed2");
    const fs::path c1 = write_config(d1, cfg);
    const fs::path c2 = write_config(d2, cfg);
    run_cli("simulate --config " + c1.string() + " --out " + d1.string(), d1);
    run_cli("simulate --config " + c2.string() + " --out " + d2.string() + " --seed 2", d2);
    CHECK(slurp(d1 / "path.csv") != slurp(d2 / "path.csv"));
}

TEST_CASE("estimate writes json and csv records") {
    const fs::path dir = fresh_dir("estimate");
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {0.0}}, {"alpha", 2.0},
                                 {"innovation", {{"dist", "pareto"}, {"alpha", 2.0}}}}},
                      {"n", 5000},
                      {"seed", 7},
                      {"estimator", "hill"},
                      {"k", 200}};
    const fs::path cp = write_config(dir, cfg);
    const RunResult r =
        run_cli("estimate --config " + cp.string() + " --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);
    const json rec = json::parse(slurp(dir / "estimate.json"));
    CHECK(rec.at("name") == "hill");
    CHECK(rec.at("value").get<double>() == Catch::Approx(0.5).margin(0.15));
    CHECK(slurp(dir / "estimate.csv").rfind("name,n,k,h,value", 0) == 0);
}

TEST_CASE("override flag reaches nested config fields") {
    const fs::path dir = fresh_dir("override");
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {0.9}}, {"alpha", 2.0}}}};
    const fs::path cp = write_config(dir, cfg);
    const RunResult r = run_cli("validate --config " + cp.string() + " --out " + dir.string() +
                                    " --override model.phi=[1.5]",
                                dir);
    CHECK(r.exit_code == 2);  // the override makes the model explosive
    const json report = json::parse(slurp(dir / "validation.json"));
    CHECK(report.at("spectral_radius").get<double>() == Catch::Approx(1.5));
}

TEST_CASE("extremogram emits lag zero equal to one") {
    const fs::path dir = fresh_dir("extremo");
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {0.0}}, {"alpha", 2.0},
                                 {"innovation", {{"dist", "pareto"}, {"alpha", 2.0}}}}},
                      {"n", 5000},
                      {"seed", 5},
                      {"k", 100},
                      {"L", 5}};
    const fs::path cp = write_config(dir, cfg);
    const RunResult r =
        run_cli("extremogram --config " + cp.string() + " --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(slurp(dir / "extremogram.json"));
    CHECK(rep.at("c")[0].get<double>() == Catch::Approx(1.0));
    const std::string csv = slurp(dir / "extremogram.csv");
    CHECK(csv.rfind("lag,value\n0,1\n", 0) == 0);
}

TEST_CASE("variance reports a positive hill limit variance") {
    const fs::path dir = fresh_dir("variance");
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {0.7}}, {"alpha", 2.0},
                                 {"innovation", {{"dist", "pareto"}, {"alpha", 2.0}}}}},
                      {"n", 100000},
                      {"seed", 9},
                      {"k", 1000},
                      {"L", 20},
                      {"alpha", 2.0}};
    const fs::path cp = write_config(dir, cfg);
    const RunResult r =
        run_cli("variance --config " + cp.string() + " --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(slurp(dir / "variance.json"));
    CHECK(rep.at("hill_limit_variance").get<double>() > 0.25);
    CHECK(rep.at("anchors").get<std::size_t>() >= 50);
}

TEST_CASE("mc run is deterministic and gates on the theory target") {
    json cfg = {{"model", {{"model", "ar"}, {"phi", {0.0}}, {"alpha", 2.0},
                           {"innovation", {{"dist", "pareto"}, {"alpha", 2.0}}}}},
                {"n", 2000},
                {"k", 100},
                {"statistic", "hill"},
                {"replications", 40},
                {"master_seed", 11},
                {"pilot_multiplier", 10.0},
                {"theory_target", 0.25},
                {"tolerance_rel", 0.6}};
    const fs::path d1 = fresh_dir("mc1");
    const fs::path d2 = fresh_dir("mc2");
    const fs::path c1 = write_config(d1, cfg);
    const fs::path c2 = write_config(d2, cfg);
    const RunResult r1 = run_cli("mc --config " + c1.string() + " --out " + d1.string(), d1);
    const RunResult r2 = run_cli("mc --config " + c2.string() + " --out " + d2.string() +
                                     " --workers 3",
                                 d2);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(d1 / "replications.csv") == slurp(d2 / "replications.csv"));

    // An absurd target trips the tolerance gate: exit code 1.
    cfg["theory_target"] = 50.0;
    cfg["tolerance_rel"] = 0.1;
    const fs::path d3 = fresh_dir("mc3");
    const fs::path c3 = write_config(d3, cfg);
    const RunResult r3 = run_cli("mc --config " + c3.string() + " --out " + d3.string(), d3);
    CHECK(r3.exit_code == 1);
    CHECK(r3.stderr_text.find("tolerance") != std::string::npos);
}

TEST_CASE("counterexample subcommand reports the regime") {
    const fs::path dir = fresh_dir("counter");
    const json cfg = {{"model", {{"model", "renewal"}, {"beta", 3.0}}},
                      {"n", 2000},
                      {"u_exponent", 0.2},
                      {"s_grid", {1.0, 2.0}},
                      {"replications", 10},
                      {"master_seed", 13},
                      {"pilot_multiplier", 5.0}};
    const fs::path cp = write_config(dir, cfg);
    const RunResult r =
        run_cli("counterexample --config " + cp.string() + " --out " + dir.string(), dir);
    REQUIRE(r.exit_code == 0);
    const json rep = json::parse(slurp(dir / "counterexample.json"));
    CHECK(rep.at("regime") == "gaussian");
    CHECK(rep.at("variance_per_s").size() == 2);
}

TEST_CASE("missing config file exits with code 2") {
    const fs::path dir = fresh_dir("noconfig");
    const RunResult r = run_cli("simulate --config /tmp/no_such_config_tailproc.json", dir);
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.find("cannot open") != std::string::npos);
}

TEST_CASE("malformed config exits with code 2") {
    const fs::path dir = fresh_dir("badjson");
    const fs::path cp = dir / "config.json";
    std::ofstream(cp) << "{broken";
    const RunResult r =
        run_cli("simulate --config " + cp.string() + " --out " + dir.string(), dir);
    CHECK(r.exit_code == 2);
}

TEST_CASE("config missing required fields exits with code 2") {
    const fs::path dir = fresh_dir("missingfield");
    const json cfg = {{"model", {{"model", "ar"}, {"phi", {0.5}}, {"alpha", 2.0}}}};
    const fs::path cp = write_config(dir, cfg);
    // simulate requires n and seed
    const RunResult r =
        run_cli("simulate --config " + cp.string() + " --out " + dir.string(), dir);
    CHECK(r.exit_code == 2);
}
