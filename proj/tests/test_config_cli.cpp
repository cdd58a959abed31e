#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dyslex/cli.hpp"
#include "dyslex/config.hpp"
#include "helpers.hpp"
#include "json.hpp"

using namespace dyslex;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = cli::run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// every failure path emits one machine-readable error object
nlohmann::json error_json(const CliRun& r) {
    REQUIRE(!r.err.empty());
    return nlohmann::json::parse(r.err).at("error");
}

std::vector<std::string> small_synth_args(const std::string& outdir, const char* seed = "5") {
    return {"synth",           "--outdir",        outdir, "--n-control", "3", "--n-dyslexic", "3",
            "--word-count",    "120",             "--max-fixations",    "30",
            "--seed",          seed};
}

}  // namespace

TEST_SUITE("config_cli") {

TEST_CASE("run config serializes every key round-trip") {
    config::RunConfig cfg;
    cfg.sessions = "a.csv";
    cfg.pipeline = "gnb:min_mse,svm:none";
    cfg.c_param = 2.5;
    cfg.cv_folds = 4;
    cfg.nested_selection = true;
    cfg.sigma_grid = {5.0, 12.5};
    cfg.threads = 3;
    cfg.synth.seed = 99;
    cfg.synth.dyslexic.regression_prob = 0.0625;

    const std::string dir = testhelp::fresh_dir("cfg");
    testhelp::spit(dir + "/run.txt", cfg.to_kv());
    const auto back = config::RunConfig::from_file(dir + "/run.txt");
    CHECK(back.to_kv() == cfg.to_kv());
    CHECK(back.sessions == "a.csv");
    CHECK(back.c_param == 2.5);
    CHECK(back.nested_selection);
    CHECK(back.sigma_grid == std::vector<double>{5.0, 12.5});
    CHECK(back.synth.seed == 99);
    CHECK(back.synth.dyslexic.regression_prob == 0.0625);

    // the flat namespace covers the config keys and the synth keys, nothing else
    for (const auto& key : config::RunConfig::keys())
        CHECK(cfg.to_kv().find(key + "=") != std::string::npos);
    CHECK_THROWS_WITH_AS(cfg.apply_kv("nope", "1"), doctest::Contains("unknown config key 'nope'"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(cfg.apply_kv("c_param", "abc"),
                         doctest::Contains("config key 'c_param': bad value 'abc'"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(cfg.apply_kv("nested_selection", "maybe"), doctest::Contains("bad value"),
                         std::invalid_argument);
    CHECK_THROWS_AS(cfg.apply_kv("sigma_grid", ""), std::invalid_argument);
}

TEST_CASE("pipeline strings resolve to spec lists") {
    config::RunConfig cfg;
    CHECK(cfg.pipelines().size() == 1);
    CHECK(cfg.pipelines()[0].name() == "svm:one_se");

    cfg.pipeline = "battery";
    CHECK(cfg.pipelines().size() == 12);

    cfg.pipeline = " svm:none , kmeans3:min_mse ";
    cfg.c_param = 7.0;
    const auto specs = cfg.pipelines();
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].name() == "svm:none");
    CHECK(specs[1].name() == "kmeans3:min_mse");
    CHECK(specs[0].c_param == 7.0);  // base settings flow into every token

    cfg.pipeline = "svm:bogus";
    CHECK_THROWS_AS(cfg.pipelines(), std::invalid_argument);
    cfg.pipeline = " , ";
    CHECK_THROWS_AS(cfg.pipelines(), std::invalid_argument);

    cfg.noise_mode = "train_on_noisy";
    CHECK(cfg.noise_spec().mode == pipeline::NoiseMode::train_on_noisy);
    cfg.noise_mode = "sometimes";
    CHECK_THROWS_AS(cfg.noise_spec(), std::invalid_argument);
}

TEST_CASE("synth runs are reproducible from flags or the echoed config") {
    const std::string dir1 = testhelp::fresh_dir("cli_s1");
    const std::string dir2 = testhelp::fresh_dir("cli_s2");
    const std::string dir3 = testhelp::fresh_dir("cli_s3");

    const auto r1 = run_cli(small_synth_args(dir1));
    REQUIRE(r1.code == 0);
    CHECK(r1.out.find("synth: 6 sessions") != std::string::npos);
    for (const char* name : {"sessions.csv", "layout.json", "spec.txt", "config.txt"})
        CHECK(fs::exists(fs::path(dir1) / "synth" / name));

    // same flags, fresh outdir: identical artifacts
    const auto r2 = run_cli(small_synth_args(dir2));
    REQUIRE(r2.code == 0);
    CHECK(testhelp::slurp(dir1 + "/synth/sessions.csv") == testhelp::slurp(dir2 + "/synth/sessions.csv"));
    CHECK(testhelp::slurp(dir1 + "/synth/layout.json") == testhelp::slurp(dir2 + "/synth/layout.json"));

    // the echoed config alone reproduces the run
    const auto r3 = run_cli({"synth", "--config", dir1 + "/synth/config.txt", "--outdir", dir3});
    REQUIRE(r3.code == 0);
    CHECK(testhelp::slurp(dir1 + "/synth/sessions.csv") == testhelp::slurp(dir3 + "/synth/sessions.csv"));

    // a different seed actually changes the data
    const std::string dir4 = testhelp::fresh_dir("cli_s4");
    const auto r4 = run_cli(small_synth_args(dir4, "6"));
    REQUIRE(r4.code == 0);
    CHECK(testhelp::slurp(dir1 + "/synth/sessions.csv") != testhelp::slurp(dir4 + "/synth/sessions.csv"));
}

TEST_CASE("downstream subcommands consume the synth artifacts") {
    const std::string dir = testhelp::fresh_dir("cli_flow");
    REQUIRE(run_cli(small_synth_args(dir)).code == 0);
    const std::string sessions = dir + "/synth/sessions.csv";
    const std::string layout = dir + "/synth/layout.json";
    const std::string sessions_before = testhelp::slurp(sessions);

    const auto v = run_cli({"validate", "--outdir", dir, "--sessions", sessions, "--layout", layout});
    REQUIRE(v.code == 0);
    const auto vj = nlohmann::json::parse(testhelp::slurp(dir + "/validate/validation.json"));
    CHECK(vj.contains("majority_class_fraction"));
    CHECK(vj.at("sessions").size() == 6);

    const auto f = run_cli({"features", "--outdir", dir, "--sessions", sessions, "--layout", layout});
    REQUIRE(f.code == 0);
    CHECK(fs::exists(fs::path(dir) / "features" / "features.csv"));
    CHECK(fs::exists(fs::path(dir) / "features" / "ecdf" / "n_fixations_control.csv"));

    const auto s = run_cli({"select", "--outdir", dir, "--sessions", sessions, "--layout", layout,
                            "--cv-folds", "3"});
    REQUIRE(s.code == 0);
    const auto cv = nlohmann::json::parse(testhelp::slurp(dir + "/select/cv_t1.json"));
    CHECK(cv.contains("lambda_1se"));
    CHECK(cv.at("lambda_grid").size() == 100);

    // evaluating twice from the same inputs gives byte-identical reports
    const std::string e1 = testhelp::fresh_dir("cli_e1");
    const std::string e2 = testhelp::fresh_dir("cli_e2");
    const std::vector<std::string> eval_args{"evaluate", "--sessions", sessions, "--layout", layout,
                                             "--cv-folds", "3", "--pipeline", "svm:one_se,gnb:none"};
    auto with_outdir = [&](std::string out) {
        auto a = eval_args;
        a.push_back("--outdir");
        a.push_back(std::move(out));
        return a;
    };
    REQUIRE(run_cli(with_outdir(e1)).code == 0);
    REQUIRE(run_cli(with_outdir(e2)).code == 0);
    CHECK(testhelp::slurp(e1 + "/evaluate/table.csv") == testhelp::slurp(e2 + "/evaluate/table.csv"));
    CHECK(testhelp::slurp(e1 + "/evaluate/report.json") == testhelp::slurp(e2 + "/evaluate/report.json"));
    const std::string table = testhelp::slurp(e1 + "/evaluate/table.csv");
    CHECK(table.rfind("pipeline,t1\n", 0) == 0);
    CHECK(table.find("\ntrivial,") != std::string::npos);  // multi-pipeline runs add the baseline

    const auto n = run_cli({"noise", "--outdir", dir, "--sessions", sessions, "--layout", layout,
                            "--cv-folds", "3", "--sigma-grid", "12", "--replicates", "2"});
    REQUIRE(n.code == 0);
    const auto nj = nlohmann::json::parse(testhelp::slurp(dir + "/noise/report.json"));
    CHECK(nj.at("noise").at("rows").size() == 1);
    CHECK(nj.at("noise").at("rows")[0].at("replicate_pct").size() == 2);

    // no subcommand touches its inputs
    CHECK(testhelp::slurp(sessions) == sessions_before);
}

TEST_CASE("failures map to distinct exit codes") {
    const std::string dir = testhelp::fresh_dir("cli_err");

    auto usage = run_cli({"frobnicate"});
    CHECK(usage.code == cli::kExitUsage);
    CHECK(error_json(usage).at("kind") == "usage");
    CHECK(run_cli({"synth", "--no-such-flag", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({}).code == cli::kExitUsage);

    auto missing = run_cli({"validate", "--outdir", dir, "--sessions", dir + "/absent.csv",
                            "--layout", dir + "/absent.json"});
    CHECK(missing.code == cli::kExitMissingInput);
    CHECK(error_json(missing).at("kind") == "missing_input");
    CHECK(error_json(missing).at("code") == 3);

    auto unconfigured = run_cli({"validate", "--outdir", dir});
    CHECK(unconfigured.code == cli::kExitMissingInput);
    CHECK(error_json(unconfigured).at("message") == "no sessions file configured");

    auto bad_spec = run_cli(
        {"synth", "--outdir", dir, "--n-control", "2", "--n-dyslexic", "2", "--saccade-within-cv", "2"});
    CHECK(bad_spec.code == cli::kExitConfig);
    CHECK(error_json(bad_spec).at("kind") == "config");

    // malformed cohort data: right files, wrong content
    REQUIRE(run_cli(small_synth_args(dir)).code == 0);
    testhelp::spit(dir + "/broken.csv", "who,what\n1,2\n");
    auto broken = run_cli({"validate", "--outdir", dir, "--sessions", dir + "/broken.csv",
                           "--layout", dir + "/synth/layout.json"});
    CHECK(broken.code == cli::kExitData);
    CHECK(error_json(broken).at("kind") == "data");

    auto twice = run_cli({"noise", "--outdir", dir, "--sessions", dir + "/synth/sessions.csv",
                          "--layout", dir + "/synth/layout.json", "--pipeline", "svm:one_se,gnb:none"});
    CHECK(twice.code == cli::kExitConfig);
    CHECK(error_json(twice).at("message") == "noise: configure exactly one pipeline");
}

TEST_CASE("the environment can supply the output root") {
    const std::string env_dir = testhelp::fresh_dir("cli_env");
    const std::string flag_dir = testhelp::fresh_dir("cli_envflag");
    REQUIRE(::setenv("DYSLEXML_OUTDIR", env_dir.c_str(), 1) == 0);

    auto args = small_synth_args("ignored");
    args.erase(args.begin() + 1, args.begin() + 3);  // drop --outdir so the env applies
    CHECK(run_cli(args).code == 0);
    CHECK(fs::exists(fs::path(env_dir) / "synth" / "sessions.csv"));

    // an explicit flag still beats the environment
    CHECK(run_cli(small_synth_args(flag_dir)).code == 0);
    CHECK(fs::exists(fs::path(flag_dir) / "synth" / "sessions.csv"));
    ::unsetenv("DYSLEXML_OUTDIR");
}

}  // TEST_SUITE
