#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pendlab/session.hpp"

namespace pendlab {

/// Column order of the session CSV.
inline constexpr std::string_view kCsvHeader =
    "t,theta,omega,r,tau_cmd,tau_sat,disturbance,energy,aug_energy,theta_meas,omega_meas";

/// Header, one row per frame (10 significant digits, '.' decimal point, no
/// locale), then a `#` comment block with outcome, metrics, config hash and
/// every resolved setting as `#config key = value`. An absent aug_energy is an
/// empty field.
void write_csv(std::ostream& out, const SessionRecord& record);
std::string to_csv(const SessionRecord& record);

struct ParsedCsv {
    std::vector<TelemetryFrame> frames;
    /// `key = value` pairs from `# ` comment lines.
    std::vector<std::pair<std::string, std::string>> summary;
    /// Settings from `#config` lines.
    std::vector<Setting> config;
};

ParsedCsv parse_csv(std::string_view text);

/// 10-significant-digit locale-free formatting used for CSV cells.
std::string format_cell(double value);

}  // namespace pendlab
