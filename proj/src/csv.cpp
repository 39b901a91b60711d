#include "pendlab/csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "pendlab/errors.hpp"

namespace pendlab {

std::string format_cell(double value) {
    std::array<char, 48> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 10);
    return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& out, const SessionRecord& record) {
    out << kCsvHeader << '\n';
    for (const auto& f : record.frames) {
        out << format_cell(f.t) << ',' << format_cell(f.theta) << ',' << format_cell(f.omega) << ','
            << format_cell(f.r) << ',' << format_cell(f.tau_cmd) << ',' << format_cell(f.tau_sat) << ','
            << format_cell(f.disturbance) << ',' << format_cell(f.energy) << ','
            << (f.aug_energy ? format_cell(*f.aug_energy) : std::string{}) << ',' << format_cell(f.theta_meas)
            << ',' << format_cell(f.omega_meas) << '\n';
    }

    out << "# outcome = " << to_string(record.outcome) << '\n';
    if (!record.diagnostic.empty()) out << "# diagnostic = " << record.diagnostic << '\n';
    out << "# frames = " << record.frames.size() << '\n';
    if (record.metrics) {
        const auto& m = *record.metrics;
        out << "# metrics.overshoot = " << format_cell(m.overshoot) << '\n';
        out << "# metrics.settling_time_2pct = "
            << (m.settling_time_2pct ? format_cell(*m.settling_time_2pct) : std::string("not-settled")) << '\n';
        out << "# metrics.rms_error = " << format_cell(m.rms_error) << '\n';
        out << "# metrics.steady_state_error = " << format_cell(m.steady_state_error) << '\n';
    }
    out << "# final_integral = " << format_cell(record.final_integral) << '\n';
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(record.config)));
    out << "# config_hash = " << hash << '\n';
    for (const auto& [key, value] : to_settings(record.config)) out << "#config " << key << " = " << value << '\n';
}

std::string to_csv(const SessionRecord& record) {
    std::ostringstream out;
    write_csv(out, record);
    return out.str();
}

namespace {

double cell_value(std::string_view cell, std::size_t row) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ConfigError("row " + std::to_string(row) + ": bad number '" + std::string(cell) + "'", "csv");
    }
    return value;
}

std::pair<std::string, std::string> split_setting(std::string_view body) {
    const auto eq = body.find(" = ");
    if (eq == std::string_view::npos) return {std::string(body), {}};
    return {std::string(body.substr(0, eq)), std::string(body.substr(eq + 3))};
}

}  // namespace

ParsedCsv parse_csv(std::string_view text) {
    ParsedCsv out;
    bool header_seen = false;
    std::size_t row = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty()) continue;
        if (line.rfind("#config ", 0) == 0) {
            out.config.push_back(split_setting(line.substr(8)));
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            out.summary.push_back(split_setting(line.substr(2)));
            continue;
        }
        if (!header_seen) {
            if (line != kCsvHeader) throw ConfigError("unexpected CSV header", "csv");
            header_seen = true;
            continue;
        }
        ++row;
        std::array<std::string_view, 11> cells{};
        std::size_t n = 0;
        while (n < cells.size()) {
            const auto comma = line.find(',');
            cells[n++] = line.substr(0, comma);
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (n != cells.size()) throw ConfigError("row " + std::to_string(row) + ": expected 11 fields", "csv");
        TelemetryFrame f;
        f.t = cell_value(cells[0], row);
        f.theta = cell_value(cells[1], row);
        f.omega = cell_value(cells[2], row);
        f.r = cell_value(cells[3], row);
        f.tau_cmd = cell_value(cells[4], row);
        f.tau_sat = cell_value(cells[5], row);
        f.disturbance = cell_value(cells[6], row);
        f.energy = cell_value(cells[7], row);
        if (!cells[8].empty()) f.aug_energy = cell_value(cells[8], row);
        f.theta_meas = cell_value(cells[9], row);
        f.omega_meas = cell_value(cells[10], row);
        out.frames.push_back(f);
    }
    return out;
}

}  // namespace pendlab
