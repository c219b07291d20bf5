#include "qss/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

using namespace qss;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qss");
    std::vector<const char *> argv;
    for (auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(CmdShares, prime_modulus) {
    const auto r = run_cli({"shares", "--d", "5", "--secret-coeffs", "3,2", "--xs", "1,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("share 1: (1, 0)"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("share 2: (2, 2)"), std::string::npos);
    EXPECT_NE(r.out.find("s_1 = 0\ns_2 = 3\n"), std::string::npos);
    EXPECT_NE(r.out.find("sum s_r mod d = 3"), std::string::npos);
}

TEST(CmdShares, json_output) {
    const auto r = run_cli({"shares", "--d", "7", "--secret-coeffs", "5,3,2", "--xs", "1,2,3", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["sum"], 5);
    std::vector<Residue> s;
    for (const auto &term : doc["terms"]) {
        s.push_back(term["s"]);
    }
    EXPECT_EQ(s, (std::vector<Residue>{2, 6, 4}));
}

TEST(CmdShares, composite_denominator_exits_3) {
    const auto r = run_cli({"shares", "--d", "4", "--secret-coeffs", "1,2", "--xs", "1,3"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("value 2 is not invertible mod 4"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("3 - 1"), std::string::npos) << r.err;
}

TEST(CmdShares, usage_errors_exit_2) {
    EXPECT_EQ(run_cli({"shares", "--d", "5", "--secret-coeffs", "3,2"}).code, 2);
    EXPECT_EQ(run_cli({"shares", "--d", "5", "--secret-coeffs", "3,2", "--xs", "1,1"}).code, 2);
    EXPECT_EQ(run_cli({"shares", "--d", "5", "--secret-coeffs", "3,9", "--xs", "1,2"}).code, 2);
    EXPECT_EQ(run_cli({"shares", "--d", "5", "--secret-coeffs", "3,2", "--xs", "1"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"bogus"}).code, 2);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(CmdSimulate, product_counterfactual) {
    const auto r = run_cli({"simulate", "--variant", "product-counterfactual", "--secret", "3", "--d", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("final_outcome 3\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("outcome == secret: yes"), std::string::npos);
}

TEST(CmdSimulate, repaired_any_seed) {
    for (int seed = 0; seed < 20; ++seed) {
        const auto r = run_cli(
            {"simulate", "--variant", "repaired", "--d", "4", "--s-vector", "3,0,0", "--seed", std::to_string(seed)});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_NE(r.out.find("outcome == secret: yes"), std::string::npos) << r.out;
    }
}

TEST(CmdSimulate, song_original_seed_sweep) {
    int yes = 0;
    const int seeds = 400;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto r = run_cli({"simulate", "--variant", "song-original", "--d", "4", "--s-vector", "3,0,0", "--seed",
                                std::to_string(seed)});
        ASSERT_EQ(r.code, 0) << r.err;
        yes += r.out.find("outcome == secret: yes") != std::string::npos ? 1 : 0;
    }
    // p = 0.25, sigma = sqrt(0.25 * 0.75 / 400) ~ 0.0217; 4 sigma window.
    EXPECT_NEAR(double(yes) / seeds, 0.25, 4 * 0.0217);
}

TEST(CmdSimulate, polynomial_secret_and_json) {
    const auto r = run_cli({"simulate", "--variant", "repaired", "--d", "7", "--secret-coeffs", "5,3,2", "--xs",
                            "1,2,3,4", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["expected_secret"], 5);
    EXPECT_EQ(doc["final_outcome"], 5);
    EXPECT_EQ(doc["verdict"], "outcome == secret: yes");
    EXPECT_EQ(Transcript::from_json(doc).to_json()["events"], doc["events"]);
}

TEST(CmdSimulate, errors) {
    EXPECT_EQ(run_cli({"simulate", "--d", "4", "--s-vector", "3,0", "--secret-coeffs", "1,2", "--xs", "1,2"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", "--d", "4"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", "--d", "4", "--s-vector", "4,0"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", "--variant", "nope", "--d", "4", "--s-vector", "1"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", "--d", "4", "--secret-coeffs", "1,2", "--xs", "1,3"}).code, 3);
    EXPECT_EQ(run_cli({"simulate", "--d", "4", "--s-vector", "1,2", "--secret", "1"}).code, 2);
}

TEST(CmdSimulate, size_cap_env) {
    ::setenv(cli::kSizeCapEnv, "16", 1);
    const auto capped = run_cli({"simulate", "--d", "4", "--s-vector", "3,0,0"});
    ::setenv(cli::kSizeCapEnv, "junk", 1);
    const auto junk = run_cli({"simulate", "--d", "4", "--s-vector", "3,0,0"});
    ::unsetenv(cli::kSizeCapEnv);
    EXPECT_EQ(capped.code, 2);
    EXPECT_NE(capped.err.find("exceeds cap"), std::string::npos) << capped.err;
    EXPECT_EQ(junk.code, 2);
    EXPECT_EQ(run_cli({"simulate", "--d", "4", "--s-vector", "3,0,0"}).code, 0);
}

TEST(CmdSimulate, deterministic_default_seed) {
    const auto a = run_cli({"simulate", "--d", "5", "--s-vector", "1,2,3"});
    const auto b = run_cli({"simulate", "--d", "5", "--s-vector", "1,2,3"});
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("seed " + std::to_string(kDefaultSeed)), std::string::npos);
    EXPECT_EQ(run_cli({"simulate", "--d", "5", "--s-vector", "1,2,3", "--entropy-seed"}).code, 0);
}

TEST(CmdExample, text_and_json) {
    const auto r = run_cli({"example"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("verdict: comment confirmed: outcome uniform, secret not recoverable"), std::string::npos);
    EXPECT_NE(r.out.find("exact Pr[outcome == a_0] = 0.25"), std::string::npos) << r.out;

    const auto j = run_cli({"example", "--format", "json"});
    ASSERT_EQ(j.code, 0);
    const auto doc = nlohmann::json::parse(j.out);
    EXPECT_DOUBLE_EQ(doc["exact_p"].get<double>(), 0.25);
    EXPECT_EQ(ExampleReport::from_json(doc).to_json(), doc);
    EXPECT_EQ(run_cli({"example", "--format", "json"}).out, j.out);
}

TEST(CmdExample, writes_only_to_output_path) {
    const auto dir = std::filesystem::temp_directory_path() / "qss_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "report.json";
    std::filesystem::remove(path);
    const auto r = run_cli({"example", "--format", "json", "--trials", "100", "--output", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    const auto doc = nlohmann::json::parse(f);
    EXPECT_EQ(doc["mc"]["trials"], 100);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto &e : std::filesystem::directory_iterator(dir)) {
        ++files;
    }
    EXPECT_EQ(files, 1u);
    std::filesystem::remove_all(dir);

    EXPECT_EQ(run_cli({"example", "--output", "/nonexistent/dir/x.json"}).code, 2);
    EXPECT_EQ(run_cli({"example", "--trials", "0"}).code, 2);
}

TEST(CmdSweep, song_and_repaired) {
    const auto r = run_cli({"sweep", "--d-values", "2,3,4,5", "--t-values", "2,3"});
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = run_cli({"sweep", "--d-values", "2,3,4,5", "--t-values", "1,2,3", "--format", "json"});
    ASSERT_EQ(j.code, 0);
    const auto doc = nlohmann::json::parse(j.out);
    for (const auto &cell : doc["cells"]) {
        const double want = cell["t"] == 1 ? 1.0 : 1.0 / cell["d"].get<double>();
        EXPECT_NEAR(cell["min_p"].get<double>(), want, 1e-10);
        EXPECT_NEAR(cell["max_p"].get<double>(), want, 1e-10);
    }
    const auto rep =
        run_cli({"sweep", "--variant", "repaired", "--d-values", "2,3,4", "--t-values", "2,3", "--format", "json"});
    ASSERT_EQ(rep.code, 0);
    for (const auto &cell : nlohmann::json::parse(rep.out)["cells"]) {
        EXPECT_NEAR(cell["min_p"].get<double>(), 1.0, 1e-10);
    }
}

TEST(CmdSweep, out_of_range_exit_2) {
    EXPECT_EQ(run_cli({"sweep", "--d-values", "9"}).code, 2);
    EXPECT_EQ(run_cli({"sweep", "--t-values", "5"}).code, 2);
    ::setenv(cli::kSizeCapEnv, "100", 1);
    const auto capped = run_cli({"sweep", "--d-values", "8", "--t-values", "3"});
    ::unsetenv(cli::kSizeCapEnv);
    EXPECT_EQ(capped.code, 2);
}
