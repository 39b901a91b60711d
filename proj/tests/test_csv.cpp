#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pendlab/csv.hpp"
#include "pendlab/errors.hpp"

using namespace pendlab;

namespace {

std::size_t data_rows(const std::string& csv) {
    std::size_t rows = 0;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        auto end = csv.find('\n', pos);
        if (end == std::string::npos) end = csv.size();
        if (csv[pos] != '#' && csv.compare(pos, 2, "t,") != 0 && end > pos) ++rows;
        pos = end + 1;
    }
    return rows;
}

ScenarioConfig noisy_pid() {
    ScenarioConfig c;
    c.params.b = 0.1;
    c.reference = ConstantReference{1.0};
    c.noise = {0.02, 0.003, 0.02, 0};
    c.seed = 5;
    c.duration = 10.0;
    return c;
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("header, 10 s at 1 ms gives 10001 rows") {
    const auto csv = to_csv(run_headless(noisy_pid()));
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(data_rows(csv) == 10001);
    CHECK(csv.find("#config controller.type = pid") != std::string::npos);
    CHECK(csv.find("# config_hash = ") != std::string::npos);
    CHECK(csv.find("# metrics.rms_error = ") != std::string::npos);
}

TEST_CASE("round trip to 1e-9 relative") {
    const auto rec = run_headless(noisy_pid());
    const auto parsed = parse_csv(to_csv(rec));
    REQUIRE(parsed.frames.size() == rec.frames.size());
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::abs(b) + 1e-300; };
    for (std::size_t i = 0; i < rec.frames.size(); ++i) {
        const auto& a = parsed.frames[i];
        const auto& b = rec.frames[i];
        CHECK(close(a.t, b.t));
        CHECK(close(a.theta, b.theta));
        CHECK(close(a.omega, b.omega));
        CHECK(close(a.tau_cmd, b.tau_cmd));
        CHECK(close(a.theta_meas, b.theta_meas));
        REQUIRE(a.aug_energy.has_value() == b.aug_energy.has_value());
        if (b.aug_energy) CHECK(close(*a.aug_energy, *b.aug_energy));
    }
}

TEST_CASE("property: cell formatting round-trips to 1e-9 relative") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> mant(-10.0, 10.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int i = 0; i < 5000; ++i) {
        const double x = mant(rng) * std::pow(10.0, expo(rng));
        const double y = std::stod(format_cell(x));
        CHECK(std::abs(y - x) <= 1e-9 * std::abs(x));
    }
    CHECK(format_cell(0.0) == "0");
    CHECK(format_cell(-2.5) == "-2.5");
    CHECK(format_cell(1e-3).find(',') == std::string::npos);
}

TEST_CASE("open-loop frames leave aug_energy empty") {
    ScenarioConfig c;
    c.mode = Mode::OpenLoopTorque;
    c.reference = ConstantReference{0.1};
    c.duration = 0.002;
    const auto csv = to_csv(run_headless(c));
    const auto row_start = csv.find('\n') + 1;
    const auto row = csv.substr(row_start, csv.find('\n', row_start) - row_start);
    CHECK(row.find(",,") != std::string::npos);
    auto parsed = parse_csv(csv);
    CHECK_FALSE(parsed.frames.front().aug_energy);
}

TEST_CASE("empty aborted record: header plus comments only") {
    SessionRecord rec;
    rec.outcome = Outcome::Aborted;
    rec.diagnostic = "real-time lag";
    const auto csv = to_csv(rec);
    CHECK(data_rows(csv) == 0);
    CHECK(csv.find("# outcome = Aborted") != std::string::npos);
    auto parsed = parse_csv(csv);
    CHECK(parsed.frames.empty());
    CHECK_FALSE(parsed.config.empty());
}

TEST_CASE("a run is reproducible from its own CSV") {
    const auto rec = run_headless(noisy_pid());
    const auto csv = to_csv(rec);
    const auto parsed = parse_csv(csv);
    ScenarioConfig again;
    apply_settings(again, parsed.config);
    CHECK(config_hash(again) == config_hash(rec.config));
    CHECK(to_csv(run_headless(again)) == csv);
}

TEST_CASE("malformed CSV") {
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n"), ConfigError);
    CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,2,3\n"), ConfigError);
}

}
