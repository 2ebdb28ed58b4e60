// Drives the built CLI binary (path passed as argv[1]) through its
// subcommands, exit codes and machine formats.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ksmatch/analysis.hpp"
#include "test_util.hpp"

namespace {

std::string g_binary;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + g_binary + " " + args + " 2>/dev/null";
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        res.out.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

void test_thresholds() {
    const RunResult table = run("thresholds --d 3");
    CHECK(table.exit_code == 0);
    CHECK(table.out.find("0.818469") != std::string::npos);
    CHECK(table.out.find("1.221793") != std::string::npos);

    // printed digits round-trip to the computed value
    const RunResult js = run("thresholds --d 3 --format json");
    CHECK(js.exit_code == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK(std::abs(doc.at("alpha1").get<double>() - ksmatch::compute_alpha1(3)) <=
          1e-12);
    CHECK(std::abs(doc.at("z1").get<double>() - ksmatch::solve_z1(3)) <= 1e-12);

    const RunResult csv = run("thresholds --d 4 --format csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.rfind("d,z1,alpha1,m_over_n\n", 0) == 0);

    CHECK(run("thresholds --d 2").exit_code == 2);
    CHECK(run("thresholds").exit_code == 2);
}

void test_predict() {
    const RunResult js = run("predict --d 3 --alpha 0.9 --format json");
    CHECK(js.exit_code == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK_NEAR(doc.at("tau1_fraction").get<double>(), 0.339, 1e-3);
    CHECK_NEAR(doc.at("mu_fraction_of_n").get<double>(), 1.0, 1e-9);
    CHECK_NEAR(doc.at("z_star").get<double>(), 2.049, 1e-3);
    CHECK(run("predict --d 3").exit_code == 2); // alpha required
}

void test_trajectory() {
    const RunResult csv = run("trajectory --d 3 --alpha 0.9 --n 10000 --points 50 --format csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.rfind("t,zeta,w,y1,y\n", 0) == 0);
    int rows = 0;
    double first_t = -1.0;
    std::size_t pos = csv.out.find('\n') + 1;
    while (pos < csv.out.size()) {
        const std::size_t end = csv.out.find('\n', pos);
        if (end == std::string::npos) break;
        if (rows == 0) first_t = std::atof(csv.out.substr(pos, end - pos).c_str());
        ++rows;
        pos = end + 1;
    }
    CHECK(rows == 50);
    CHECK_NEAR(first_t, 0.0, 1e-9);
}

void test_simulate_determinism() {
    const std::string args =
        "simulate --d 3 --alpha 0.9 --n 2000 --trials 3 --seed 7 --format csv";
    const RunResult a = run(args);
    const RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    const RunResult c = run(args + " --parallelism 4");
    CHECK(c.out == a.out);

    const RunResult js =
        run("simulate --d 3 --alpha 0.9 --n 2000 --trials 3 --seed 7 --format json");
    CHECK(js.exit_code == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK(doc.at("schema_version").get<std::string>() == "v1");
    CHECK(doc.at("results").size() == 3);
}

void test_seed_env_and_flag_precedence() {
    const std::string base = "simulate --d 3 --alpha 0.9 --n 500 --trials 2 --format csv";
    const RunResult flag = run(base + " --seed 42");
    const RunResult env = run(base, "KSMATCH_SEED=42");
    CHECK(flag.out == env.out);
    const RunResult both = run(base + " --seed 7", "KSMATCH_SEED=42");
    const RunResult direct = run(base + " --seed 7");
    CHECK(both.out == direct.out);
    CHECK(both.out != env.out);
}

void test_config_file_defaults() {
    const std::string path = "/tmp/ksmatch_test_config.ini";
    {
        std::ofstream cfg(path);
        cfg << "[simulate]\nseed=42\n";
    }
    const std::string base = "simulate --d 3 --alpha 0.9 --n 500 --trials 2 --format csv";
    const RunResult via_config = run(base + " --config " + path);
    const RunResult via_flag = run(base + " --seed 42");
    CHECK(via_config.exit_code == 0);
    CHECK(via_config.out == via_flag.out);
    // explicit flag wins over the config default
    const RunResult overridden = run(base + " --seed 9 --config " + path);
    const RunResult direct = run(base + " --seed 9");
    CHECK(overridden.out == direct.out);
    std::remove(path.c_str());
}

void test_core_check() {
    const RunResult js = run("core-check --d 4 --n 200 --m 200 --trials 10 --seed 5 --format json");
    CHECK(js.exit_code == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK(doc.at("trials").get<int>() == 10);
    CHECK(doc.at("perfect_fraction").get<double>() >= 0.0);
    // infeasible shape: d*n < 2m
    CHECK(run("core-check --d 3 --n 10 --m 100 --trials 1").exit_code == 3);
}

void test_sweep() {
    const RunResult csv = run(
        "sweep --d 3 --alpha-min 0.7 --alpha-max 0.8 --steps 2 --n 300 "
        "--trials 2 --seed 3 --format csv");
    CHECK(csv.exit_code == 0);
    int rows = 0;
    for (char ch : csv.out) rows += ch == '\n' ? 1 : 0;
    CHECK(rows == 3); // header + 2 sweep points
}

void test_self_check() {
    const RunResult res = run("self-check");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("trajectory_identity") != std::string::npos);
    CHECK(res.out.find("FAIL") == std::string::npos);
}

void test_usage_errors() {
    CHECK(run("").exit_code == 2);
    CHECK(run("unknown-subcommand").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
}

void test_output_file() {
    const std::string path = "/tmp/ksmatch_test_out.csv";
    const RunResult res = run("thresholds --d 3 --format csv --output " + path);
    CHECK(res.exit_code == 0);
    CHECK(res.out.empty());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "d,z1,alpha1,m_over_n");
    std::remove(path.c_str());
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::printf("usage: test_cli <path-to-ksmatch-binary>\n");
        return 2;
    }
    g_binary = argv[1];
    test_thresholds();
    test_predict();
    test_trajectory();
    test_simulate_determinism();
    test_seed_env_and_flag_precedence();
    test_config_file_defaults();
    test_core_check();
    test_sweep();
    test_self_check();
    test_usage_errors();
    test_output_file();
    return testutil::summary("cli");
}
