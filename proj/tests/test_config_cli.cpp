#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifdef SWSYS_CLI_PATH
#include <sys/wait.h>
#endif

#include <json.hpp>

#include "swsys/builtin_configs.hpp"
#include "swsys/commands.hpp"
#include "swsys/config.hpp"
#include "swsys/csv.hpp"

#ifndef SWSYS_CONFIGS_DIR
#define SWSYS_CONFIGS_DIR "configs"
#endif

using namespace swsys;
namespace fs = std::filesystem;

namespace {

fs::path configs_dir() { return fs::path(SWSYS_CONFIGS_DIR); }

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / ("swsys_test_" + tag + "_" +
                                                std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const fs::path& dir, const std::string& name, const std::string& text) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

const char* kTwoModeTemplate = R"JSON({
  "family": {
    "state_dim": 1, "input_dim": 1,
    "modes": [
      { "f": ["-x1 + v1"], "V": "0.5*x1^2", "lambda": 1.0 },
      { "f": ["x1"], "V": "0.5*x1^2", "lambda": -1.0 }
    ],
    "transitions": [
      { "from": 1, "to": 2, "mu": 1.0 },
      { "from": 2, "to": 1, "mu": 1.0 }
    ],
    "alpha_lower": { "coef": 0.25, "power": 2 },
    "alpha_upper": { "coef": 1.0, "power": 2 },
    "gamma": "0.5*r^2"
  },
  "bounds": { "iss": [], "non_iss": [], "switching": [] },
  "signal": { "type": "inline", "taus": [0.0, 1.0], "modes": [1, SIGMODE] }
}
)JSON";

std::string two_mode_config_with_signal_mode(const std::string& mode) {
    std::string text = kTwoModeTemplate;
    return text.replace(text.find("SIGMODE"), 7, mode);
}

}  // namespace

TEST_CASE("bundled two-mode config loads verbatim") {
    auto cfg = load_config(configs_dir() / "example_sec4.json");
    CHECK(cfg.family.state_dim == 2);
    CHECK(cfg.family.subsystems[0].lambda == 1.75);
    CHECK(cfg.family.subsystems[1].lambda == -2.1667);
    CHECK(cfg.family.mu.at({1, 2}) == 1.0);
    CHECK(cfg.family.mu.at({2, 1}) == 2.0);
    REQUIRE(cfg.certificate.has_value());
    CHECK(cfg.certificate->rho.terms().size() == 1);
    CHECK(cfg.certificate->rho.terms()[0].coef == 1e-5);
    CHECK(cfg.certificate->rho.terms()[0].power == 1.5);
    CHECK(cfg.bounds.iss.at(1).offset == 0.01);
    CHECK(cfg.bounds.non_iss.at(2).offset == 2.58);
    CHECK(cfg.bounds.switching.at({1, 2}).offset == 1.0);
    REQUIRE(cfg.simulation.has_value());
    CHECK(cfg.simulation->n_runs == 50);
    CHECK(cfg.simulation->t_end == 40.0);
}

TEST_CASE("embedded configs match the bundled files") {
    auto file_sec4 = nlohmann::json::parse(read_text(configs_dir() / "example_sec4.json"));
    auto embedded_sec4 = nlohmann::json::parse(std::string(builtin::kSec4Config));
    CHECK(file_sec4 == embedded_sec4);

    auto file_lin = nlohmann::json::parse(read_text(configs_dir() / "example_scalar_linear.json"));
    auto embedded_lin = nlohmann::json::parse(std::string(builtin::kScalarLinearConfig));
    CHECK(file_lin == embedded_lin);
}

TEST_CASE("horizon ranges expand with linear and log spacing") {
    std::string text = two_mode_config_with_signal_mode("2");
    const std::string cert_block = R"JSON(,
      "certificate": {
        "rho": { "terms": [ { "coef": 1.0, "power": 1 } ], "offset": 0.0 },
        "c1": 0.0,
        "horizons": { "start": 1.0, "stop": 100.0, "count": 3, "spacing": "log" }
      })JSON";
    text.insert(text.rfind('}') - 1, cert_block);
    auto cfg = parse_config_text(text);
    REQUIRE(cfg.certificate.has_value());
    REQUIRE(cfg.certificate->horizons.size() == 3);
    CHECK(cfg.certificate->horizons[0] == doctest::Approx(1.0));
    CHECK(cfg.certificate->horizons[1] == doctest::Approx(10.0));
    CHECK(cfg.certificate->horizons[2] == doctest::Approx(100.0));
}

TEST_CASE("referential errors carry field paths") {
    try {
        parse_config_text(two_mode_config_with_signal_mode("3"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        bool found = false;
        for (const auto& msg : e.errors())
            if (contains(msg, "signal.modes[1]") && contains(msg, "mode 3")) found = true;
        CHECK(found);
    }
    CHECK_NOTHROW(parse_config_text(two_mode_config_with_signal_mode("2")));
}

TEST_CASE("empty or malformed files are schema errors") {
    CHECK_THROWS_AS(parse_config_text(""), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1,2]"), ConfigError);
    auto dir = fresh_dir("missing");
    CHECK_THROWS_AS(load_config(dir / "nope.json"), ConfigError);
}

TEST_CASE("validation collects every error") {
    const std::string text = R"JSON({
      "family": {
        "state_dim": 1, "input_dim": 0,
        "modes": [
          { "f": ["x1 + x9"], "V": "x1^2", "lambda": 0.0 }
        ],
        "transitions": [ { "from": 1, "to": 5, "mu": -1.0 } ],
        "alpha_lower": { "coef": -1.0, "power": 2 },
        "alpha_upper": { "coef": 1.0, "power": 2 },
        "gamma": "r"
      },
      "bounds": { "iss": [], "non_iss": [], "switching": [] }
    })JSON";
    try {
        parse_config_text(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.errors().size() >= 3);  // unknown variable, zero lambda, bad transition, bad coef
        bool has_var = false, has_lambda = false;
        for (const auto& msg : e.errors()) {
            if (contains(msg, "x9")) has_var = true;
            if (contains(msg, "lambda")) has_lambda = true;
        }
        CHECK(has_var);
        CHECK(has_lambda);
    }
}

TEST_CASE("cmd_check certifies the scalar demo") {
    auto out = fresh_dir("check_scalar");
    CommandOptions opts;
    opts.config_path = (configs_dir() / "example_scalar_linear.json").string();
    opts.out_dir = out.string();
    CHECK(cmd_check(opts) == 0);
    std::string report = read_text(out / "check_report.txt");
    CHECK(contains(report, "status: certified"));
    CHECK(contains(report, "certificate.c: 1"));
    CHECK(contains(report, "family.assumptions: verified-at-samples"));
}

TEST_CASE("cmd_check refuses the two-mode study and reports the discrepancy") {
    auto out = fresh_dir("check_sec4");
    CommandOptions opts;
    opts.config_path = (configs_dir() / "example_sec4.json").string();
    opts.out_dir = out.string();
    CHECK(cmd_check(opts) == 1);
    std::string report = read_text(out / "check_report.txt");
    CHECK(contains(report, "status: refused"));
    CHECK(contains(report, "refusal.condition: rate condition"));
    CHECK(contains(report, "rate_condition.reference.declared.s^1.5: -1.725e-05"));
    CHECK(contains(report, "rate_condition.reference.recomputed.s^1.5: 0.00155786"));
    CHECK(contains(report, "rate_condition.reference.mismatch: true"));
    CHECK(contains(report, "signal.bounds: pass"));
    // The zero-gain data violates the decay inequality at sampled points.
    CHECK(contains(report, "family.mode1.decay: violated"));
    CHECK(contains(report, "family.assumptions: unverified"));
}

TEST_CASE("cmd_check on a broken config exits 2 and still writes the report") {
    auto out = fresh_dir("check_broken");
    auto cfg = write_text(out, "broken.json", "{ not json");
    CommandOptions opts;
    opts.config_path = cfg.string();
    opts.out_dir = out.string();
    CHECK(cmd_check(opts) == 2);
    CHECK(fs::exists(out / "check_report.txt"));
    CHECK(contains(read_text(out / "check_report.txt"), "status: invalid-config"));
}

TEST_CASE("cmd_generate emits a verified, bit-exact signal CSV") {
    auto out = fresh_dir("generate_sec4");
    CommandOptions opts;
    opts.config_path = (configs_dir() / "example_sec4.json").string();
    opts.out_dir = out.string();
    CHECK(cmd_generate(opts) == 0);
    REQUIRE(fs::exists(out / "signal.csv"));
    std::string text = read_text(out / "signal.csv");
    auto sig = signal_from_csv(text);
    CHECK(signal_to_csv(sig) == text);
    CHECK(sig.n_switches() >= 2);
    std::string report = read_text(out / "generate_report.txt");
    CHECK(contains(report, "status: generated"));
    CHECK(contains(report, "signal.bounds: pass"));
}

TEST_CASE("cmd_simulate writes a single trajectory CSV for a pinned run") {
    auto out = fresh_dir("simulate_pinned");
    std::string text = std::string(builtin::kScalarLinearConfig);
    // Pin the initial state and drop the batch to one written run.
    auto pos = text.find("\"n_runs\": 20");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"n_runs\": 20").size(), "\"n_runs\": 1, \"x0\": [2.0]");
    pos = text.find("\"write_trajectories\": false");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"write_trajectories\": false").size(),
                 "\"write_trajectories\": true");
    auto cfg = write_text(out, "pinned.json", text);
    CommandOptions opts;
    opts.config_path = cfg.string();
    opts.out_dir = out.string();
    CHECK(cmd_simulate(opts) == 0);
    REQUIRE(fs::exists(out / "run_0.csv"));
    auto traj = trajectory_from_csv(read_text(out / "run_0.csv"), 1, 1);
    CHECK(traj.t.back() == 20.0);
    REQUIRE(fs::exists(out / "summary.csv"));
    std::string summary = read_text(out / "summary.csv");
    CHECK(contains(summary, "run,x0_1,initial_norm,sup_norm,final_norm,diverged"));
    CHECK(contains(summary, "\n0,2,2,"));  // pinned x0 = 2, no divergence
    std::string report = read_text(out / "simulate_report.txt");
    CHECK(contains(report, "certificate: issued"));
    CHECK(contains(report, "envelope.violations: 0"));
    CHECK(contains(report, "status: completed"));
}

TEST_CASE("divergence fails the simulate command unless allowed") {
    const std::string text = R"JSON({
      "family": {
        "state_dim": 1, "input_dim": 0,
        "modes": [ { "f": ["x1"], "V": "0.5*x1^2", "lambda": -1.0 } ],
        "transitions": [],
        "alpha_lower": { "coef": 0.25, "power": 2 },
        "alpha_upper": { "coef": 1.0, "power": 2 },
        "gamma": "r"
      },
      "bounds": { "iss": [], "non_iss": [], "switching": [] },
      "signal": { "type": "inline", "taus": [0.0], "modes": [1] },
      "simulation": {
        "input": [], "t_end": 50.0, "dt": 0.01,
        "batch_box": [[1.0, 2.0]], "n_runs": 2, "seed": 3,
        "write_trajectories": false
      }
    })JSON";
    auto out = fresh_dir("simulate_divergent");
    auto cfg = write_text(out, "divergent.json", text);
    CommandOptions opts;
    opts.config_path = cfg.string();
    opts.out_dir = out.string();
    CHECK(cmd_simulate(opts) == 1);
    CHECK(contains(read_text(out / "simulate_report.txt"), "status: diverged"));
    opts.allow_divergence = true;
    CHECK(cmd_simulate(opts) == 0);
}

TEST_CASE("the seed flag overrides the configured batch seed") {
    auto out = fresh_dir("seed_override");
    CommandOptions opts;
    opts.config_path = (configs_dir() / "example_scalar_linear.json").string();

    opts.out_dir = (out / "a").string();
    opts.seed = 123;
    CHECK(cmd_simulate(opts) == 0);
    std::string a = read_text(out / "a" / "summary.csv");

    opts.out_dir = (out / "b").string();
    CHECK(cmd_simulate(opts) == 0);
    std::string b = read_text(out / "b" / "summary.csv");
    CHECK(a == b);  // same override, bit-identical summaries

    opts.out_dir = (out / "c").string();
    opts.seed = 456;
    CHECK(cmd_simulate(opts) == 0);
    CHECK(read_text(out / "c" / "summary.csv") != a);
}

TEST_CASE("reproduce-sec4 completes end to end") {
    auto out = fresh_dir("reproduce");
    CommandOptions opts;
    opts.out_dir = out.string();
    CHECK(cmd_reproduce_sec4(opts) == 0);
    CHECK(fs::exists(out / "sec4_config.json"));
    CHECK(fs::exists(out / "signal.csv"));
    CHECK(fs::exists(out / "check_report.txt"));
    CHECK(fs::exists(out / "summary.csv"));
    std::string report = read_text(out / "reproduce_report.txt");
    CHECK(contains(report, "check: refused"));
    CHECK(contains(report, "status: completed"));
}

#ifdef SWSYS_CLI_PATH
TEST_CASE("CLI binary smoke test") {
    auto out = fresh_dir("cli_smoke");
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(SWSYS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    const std::string scalar = (configs_dir() / "example_scalar_linear.json").string();
    CHECK(run("check --config " + scalar + " --out " + (out / "a").string()) == 0);
    CHECK(run("generate --config " + scalar + " --out " + (out / "b").string()) == 0);
    CHECK(run("check --config /nonexistent.json --out " + (out / "c").string()) == 2);
    CHECK(run("--help") == 0);
}
#endif
