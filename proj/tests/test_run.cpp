#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mcair/csv.hpp"
#include "mcair/mutual_info.hpp"
#include "mcair/optimize.hpp"
#include "mcair/run.hpp"

using namespace mcair;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    std::ostringstream buf;
    buf << file.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

struct TempCsv {
    std::filesystem::path path;
    explicit TempCsv(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove(path);
    }
    ~TempCsv() { std::filesystem::remove(path); }
};

int run(const std::string& command, const std::string& config_text, std::string* out_text,
        std::string* err_text = nullptr) {
    const RunConfig cfg = parse_config(config_text);
    std::ostringstream out, err;
    const int rc = run_command(command, cfg, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

}  // namespace

TEST_CASE("memory command prints the solved window length") {
    std::string out;
    CHECK(run("memory", "", &out) == 0);
    CHECK(out == "M = 9 (t_alpha = 8.66818199, t_sym = 1)\n");
    CHECK(run("memory", "t_sym = 2\n", &out) == 0);
    CHECK(out == "M = 7 (t_alpha = 13.6653872, t_sym = 2)\n");
}

TEST_CASE("cir command writes the tap table") {
    TempCsv tmp("mcair_test_cir.csv");
    std::string out;
    CHECK(run("cir", "out = " + tmp.path.string() + "\n", &out) == 0);
    CHECK(out.find("cir: t_sym = 1, M = 9, t_alpha = 8.66818199, gaussian_ok = yes") == 0);

    const std::vector<std::string> rows = lines_of(slurp(tmp.path));
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == "tap,h,gauss_ratio,gauss_ok");
    CHECK(rows[1].rfind("1,0.0475", 0) == 0);  // first tap carries ~475 molecules
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].back() == '1');  // all taps gaussian-valid at one second
        CHECK(rows[i].front() == char('0' + i % 10));
    }
}

TEST_CASE("transitions command reports the table shape") {
    TempCsv tmp("mcair_test_transitions.csv");
    std::string out;
    CHECK(run("transitions",
              "t_sym = 2\ntau = 400\nout = " + tmp.path.string() + "\n", &out) == 0);
    CHECK(out == "transitions: t_sym = 2, M = 7, histories = 64, tau = 400\n");
    const std::vector<std::string> rows = lines_of(slurp(tmp.path));
    REQUIRE(rows.size() == 129);  // header + 64 histories x 2 symbols
    CHECK(rows[0] == "history,s,p_hat0,p_hat1");
    CHECK(rows[1].rfind("000000,0,", 0) == 0);
    CHECK(rows[2].rfind("000000,1,", 0) == 0);
    CHECK(rows[128].rfind("111111,1,", 0) == 0);
}

TEST_CASE("mi command at a fixed threshold matches the library closed form") {
    const ChannelImpulseResponse cir = compute_cir(SystemParams{}, 1.0);
    const MIResult expect =
        mi_isia_markov(cir, SystemParams{}, Detector{453.887}, MarkovSource{0.45, 0.77});
    std::string out;
    CHECK(run("mi", "scenario = crr-isia\np = 0.45\nq = 0.77\ntau = 453.887\n", &out) == 0);
    CHECK(out == "mi = " + format_g9(expect.mi) + " bits/use (air = " + format_g9(expect.mi) +
                     " bits/s, tau = 453.887, M = 9, scenario = crr-isia)\n");
}

TEST_CASE("mi command optimizes the threshold when none is fixed") {
    const SystemParams params{};
    const ChannelImpulseResponse cir = compute_cir(params, 1.0);
    const ThresholdResult expect = optimize_threshold(
        IsiKnowledge::unaware, cir, params, IndependentSource{0.5},
        default_threshold_search(cir, params, SearchSettings{64, 2}));
    TempCsv tmp("mcair_test_mi.csv");
    std::string out;
    CHECK(run("mi",
              "scenario = ind-isiu\ntau_coarse_steps = 64\ntau_refine_rounds = 2\nout = " +
                  tmp.path.string() + "\n",
              &out) == 0);
    CHECK(out.find("mi = " + format_g9(expect.mi.mi) + " bits/use") == 0);
    CHECK(out.find("tau = " + format_g9(expect.tau)) != std::string::npos);

    const std::vector<std::string> rows = lines_of(slurp(tmp.path));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "t_sym,scenario,M,mi_bits_per_use,air_bits_per_s,tau,param1,param2,clipped");
    CHECK(rows[1] == "1,ind-isiu,9," + format_g9(expect.mi.mi) + "," + format_g9(expect.mi.mi) +
                         "," + format_g9(expect.tau) + ",0.5,,0");
}

TEST_CASE("sweep output is byte-identical for any worker count") {
    const std::string base =
        "scenario = crr-isiu\n"
        "t_sym_min = 0.9\nt_sym_max = 1.1\nt_sym_step = 0.1\n"
        "grid_step = 0.2\ntau_coarse_steps = 32\ntau_refine_rounds = 2\n";
    TempCsv one("mcair_test_sweep_w1.csv");
    TempCsv four("mcair_test_sweep_w4.csv");
    std::string out_one, out_four;
    CHECK(run("sweep", base + "workers = 1\nout = " + one.path.string() + "\n", &out_one) == 0);
    CHECK(run("sweep", base + "workers = 4\nout = " + four.path.string() + "\n", &out_four) == 0);
    CHECK(out_one == out_four);
    CHECK(out_one.find("sweep: 3 points (0 skipped), scenario = crr-isiu, best = ") == 0);

    const std::string csv_one = slurp(one.path);
    CHECK(csv_one == slurp(four.path));
    const std::vector<std::string> rows = lines_of(csv_one);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "t_sym,scenario,M,capacity_bits_per_s,mi_bits_per_use,tau,param1,param2");
    CHECK(rows[1].rfind("0.9,crr-isiu,", 0) == 0);
    CHECK(rows[3].rfind("1.1,crr-isiu,", 0) == 0);
}

TEST_CASE("capacity command emits a single sweep row") {
    TempCsv tmp("mcair_test_capacity.csv");
    std::string out;
    CHECK(run("capacity",
              "scenario = ind-isiu\ngrid_step = 0.5\ntau_coarse_steps = 32\n"
              "tau_refine_rounds = 1\nout = " + tmp.path.string() + "\n",
              &out) == 0);
    CHECK(out.find("capacity = ") == 0);
    CHECK(out.find("param1 = 0.5") != std::string::npos);
    CHECK(out.find("param2") == std::string::npos);  // independent source
    const std::vector<std::string> rows = lines_of(slurp(tmp.path));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].rfind("1,ind-isiu,9,", 0) == 0);
    CHECK(rows[1].back() == ',');  // empty param2 field
}

TEST_CASE("simulate is reproducible and writes one row per interval") {
    const std::string base =
        "scenario = crr-isia\nn_symbols = 500\nseed = 7\ntail = truncate\n";
    TempCsv a("mcair_test_sim_a.csv");
    TempCsv b("mcair_test_sim_b.csv");
    std::string out_a, out_b;
    CHECK(run("simulate", base + "out = " + a.path.string() + "\n", &out_a) == 0);
    CHECK(run("simulate", base + "out = " + b.path.string() + "\n", &out_b) == 0);
    CHECK(out_a == out_b);
    CHECK(out_a.find("simulate: 500 symbols, ones sent = ") == 0);

    const std::string csv = slurp(a.path);
    CHECK(csv == slurp(b.path));
    const std::vector<std::string> rows = lines_of(csv);
    REQUIRE(rows.size() == 501);
    CHECK(rows[0] == "interval_index,s,count,s_hat");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(rows[500].rfind("499,", 0) == 0);
}

TEST_CASE("validate passes its four checks on a healthy configuration") {
    TempCsv tmp("mcair_test_validate.csv");
    std::string out;
    const int rc = run("validate",
                       "scenario = crr-isiu\nt_sym = 2\nn_symbols = 20000\nseed = 2\n"
                       "out = " + tmp.path.string() + "\n",
                       &out);
    INFO(out);
    CHECK(rc == 0);
    CHECK(out.find("validate: 4/4 checks passed") != std::string::npos);
    CHECK(out.find("FAIL") == std::string::npos);

    const std::vector<std::string> rows = lines_of(slurp(tmp.path));
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == "history,s,n,p1_hat,p1_analytic,pass");
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == '1');
}

TEST_CASE("validate refuses sample sizes too small for the binomial bands") {
    std::string out, err;
    CHECK(run("validate", "n_symbols = 5000\n", &out, &err) == 1);
    CHECK(err.find("error:") == 0);
    CHECK(err.find("10000") != std::string::npos);
}

TEST_CASE("errors surface as a single diagnostic line and exit code one") {
    std::string out, err;
    CHECK(run("bogus", "", &out, &err) == 1);
    CHECK(err.find("error: unknown command 'bogus'") == 0);
    CHECK(out.empty());

    CHECK(run("memory", "t_sym = 0.2\nmemory_cap = 10\n", &out, &err) == 1);
    CHECK(err.find("error:") == 0);
    CHECK(err.find("15") != std::string::npos);  // the required memory is named
}
