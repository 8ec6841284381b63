#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jcap_cli.hpp"

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result run_inproc(std::vector<std::string> args) {
    args.insert(args.begin(), "jcap");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int st = jcap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {st, out.str(), err.str()};
}

std::string samples_dir() {
    const char* s = std::getenv("JCAP_SAMPLES");
    return s ? s : "samples";
}

std::string sample(const std::string& name) { return samples_dir() + "/" + name; }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) {
        if (c == '\'') q += "'\\''";
        else q += c;
    }
    return q + "'";
}

/// Run the installed binary; skips when JCAP_BIN is not set.
Result run_binary(const std::vector<std::string>& args) {
    const char* bin = std::getenv("JCAP_BIN");
    if (!bin) return {-1, "", ""};
    const auto dir = std::filesystem::temp_directory_path();
    const auto out = dir / ("jcap_cli_out_" + std::to_string(::getpid()));
    const auto err = dir / ("jcap_cli_err_" + std::to_string(::getpid()));
    std::string cmd = shell_quote(bin);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " >" + shell_quote(out.string()) + " 2>" + shell_quote(err.string());
    const int raw = std::system(cmd.c_str());
    Result r{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

void expect_units_in_header(const std::string& csv) {
    const auto rows = parse_csv(csv);
    ASSERT_FALSE(rows.empty());
    for (const auto& h : rows[0]) {
        if (h == "index" || h == "probability") continue;
        EXPECT_NE(h.find('['), std::string::npos) << h;
    }
}

}  // namespace

TEST(Cli, JfMonotoneAverageCost) {
    const auto r = run_inproc({"jf", "--channel", sample("awgn.json"), "--P", "0.111", "--lambda-grid", "0:4:64"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 65u);
    EXPECT_EQ(rows[0][0], "lambda [bits/power]");
    EXPECT_EQ(rows[0][2], "M [power]");
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LT(std::stod(rows[i][2]), std::stod(rows[i - 1][2])) << i;
    expect_units_in_header(r.out);
}

TEST(Cli, CapacityMatchesLibrary) {
    const auto r = run_inproc({"capacity", "--channel", sample("onebit.json"), "--P", "0.444", "--nr", "100"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto ch = jcap::load_channel(sample("onebit.json"));
    const auto sol = jcap::solve_lambda_star(ch, 0.444);
    const jcap::json want{{"inputs", {{"channel", jcap::channel_to_json(ch)}, {"P", 0.444}, {"nr", 100.0}}},
                          {"lambda_star", sol.lambda_star},
                          {"jf", sol.jf},
                          {"capacity_bits", sol.capacity_bits(100.0)}};
    EXPECT_EQ(r.out, want.dump(2) + "\n");
    const auto got = jcap::json::parse(r.out);
    EXPECT_EQ(got["capacity_bits"].get<double>(), jcap::asymptotic_capacity(ch, 0.444, 100.0));
}

TEST(Cli, ConstellationModes) {
    for (const std::string mode : {"jeffreys", "poly", "pam"}) {
        const auto r = run_inproc(
            {"constellation", "--channel", sample("onebit_a10.json"), "--P", "25", "--M", "16", "--mode", mode});
        ASSERT_EQ(r.status, 0) << mode << ": " << r.err;
        const auto rows = parse_csv(r.out);
        ASSERT_EQ(rows.size(), 17u) << mode;
        expect_units_in_header(r.out);
        std::vector<double> x;
        for (std::size_t i = 1; i < rows.size(); ++i) x.push_back(std::stod(rows[i][1]));
        for (std::size_t i = 1; i < x.size(); ++i) EXPECT_LT(x[i - 1], x[i]) << mode;
        if (mode == "pam") {
            for (std::size_t i = 2; i < x.size(); ++i) {
                EXPECT_NEAR(x[i] - x[i - 1], x[1] - x[0], 1e-12);
            }
        }
    }
}

TEST(Cli, Deterministic) {
    const std::vector<std::string> args{"mi", "--channel", sample("onebit.json"), "--P", "0.444", "--nr", "20",
                                        "--M", "8", "--optimize"};
    const auto a = run_inproc(args);
    const auto b = run_inproc(args);
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CsvHeadersCarryUnits) {
    const std::vector<std::vector<std::string>> cmds{
        {"fisher", "--channel", sample("energy.json"), "--grid", "5"},
        {"fisher", "--channel", sample("mimo.json"), "--grid", "5"},
        {"prior", "--channel", sample("noncoherent.json"), "--P", "0.2", "--grid", "5"},
        {"quant-loss", "--channel", sample("awgn.json"), "--L", "8,16,32,64"},
        {"fisher-rate", "--n", "1,2,4"},
    };
    for (const auto& c : cmds) {
        const auto r = run_inproc(c);
        ASSERT_EQ(r.status, 0) << c[0] << ": " << r.err;
        expect_units_in_header(r.out);
    }
}

TEST(Cli, QuantLossSlopeColumn) {
    const auto r = run_inproc({"quant-loss", "--channel", sample("awgn.json"), "--L", "8,16,32,64,128"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 6u);
    const double slope = std::stod(rows[1][3]);
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][3]), slope);
    EXPECT_LT(slope, 0.0);
}

TEST(Cli, FisherRateDefaults) {
    const auto r = run_inproc({"fisher-rate"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows.back()[0], "4096");
    EXPECT_NEAR(std::stod(rows.back()[1]), 1.0 / 3.0, 1e-2);
}

TEST(Cli, AllChannelSamplesLoad) {
    for (const auto& e : std::filesystem::directory_iterator(samples_dir())) {
        if (e.path().extension() != ".json") continue;
        const auto ch = jcap::load_channel(e.path().string());
        EXPECT_EQ(jcap::channel_to_json(jcap::channel_from_json(jcap::channel_to_json(ch))),
                  jcap::channel_to_json(ch))
            << e.path();
    }
}

TEST(Cli, OutFileOption) {
    const auto path = std::filesystem::temp_directory_path() / "jcap_cli_lambda.json";
    const auto r = run_inproc({"lambda-star", "--channel", sample("awgn.json"), "--P", "0.111", "--out", path.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = jcap::json::parse(slurp(path));
    EXPECT_GT(j["lambda_star"].get<double>(), 0.0);
    std::filesystem::remove(path);
}

TEST(Cli, ValidationErrorsExitOne) {
    EXPECT_EQ(run_inproc({"capacity", "--channel", sample("awgn.json"), "--P", "-1", "--nr", "10"}).status, 1);
    EXPECT_EQ(run_inproc({"capacity", "--channel", "{\"kind\":\"awgn\"}", "--P", "1", "--nr", "10"}).status, 1);
    EXPECT_EQ(run_inproc({"capacity", "--channel", "{not json", "--P", "1", "--nr", "10"}).status, 1);
    EXPECT_EQ(run_inproc({"capacity", "--channel", "/nonexistent.json", "--P", "1", "--nr", "10"}).status, 1);
    EXPECT_EQ(run_inproc({"jf", "--channel", sample("awgn.json"), "--P", "1", "--lambda-grid", "0:4"}).status, 1);
    EXPECT_EQ(run_inproc({"constellation", "--channel", sample("awgn.json"), "--P", "1", "--mode", "x"}).status, 1);
    EXPECT_EQ(run_inproc({"fisher", "--channel", sample("mimo.json"), "--grid", "1"}).status, 1);
    EXPECT_EQ(run_inproc({"nosuchcommand"}).status, 1);
    EXPECT_EQ(run_inproc({}).status, 1);
    const auto r = run_inproc({"capacity", "--channel", "{\"kind\":\"awgn\",\"A\":1,\"b\":2}", "--P", "1", "--nr", "10"});
    EXPECT_NE(r.err.find("unknown field 'b'"), std::string::npos) << r.err;
}

TEST(Cli, NumericalFailureExitsTwoAndNamesModule) {
    const auto r = run_inproc({"mi", "--channel", sample("dithered.json"), "--P", "0.2", "--nr", "200", "--M", "16"});
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("mutual_info/"), std::string::npos) << r.err;
}

TEST(Cli, HelpExitsZero) {
    const auto r = run_inproc({"--help"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("capacity"), std::string::npos);
}

TEST(CliBinary, ExitCodesAndBytes) {
    if (!std::getenv("JCAP_BIN")) GTEST_SKIP() << "JCAP_BIN not set";
    const std::vector<std::string> ok{"capacity", "--channel", sample("onebit.json"), "--P", "0.444", "--nr", "100"};
    const auto a = run_binary(ok);
    EXPECT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, run_inproc(ok).out);
    EXPECT_EQ(run_binary(ok).out, a.out);
    EXPECT_EQ(run_binary({"capacity", "--channel", sample("onebit.json"), "--P", "0", "--nr", "100"}).status, 1);
    const auto n = run_binary({"mi", "--channel", sample("dithered.json"), "--P", "0.2", "--nr", "200", "--M", "16"});
    EXPECT_EQ(n.status, 2);
    EXPECT_NE(n.err.find("mutual_info/"), std::string::npos);
}
