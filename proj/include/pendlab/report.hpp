#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pendlab/session.hpp"

namespace pendlab {

/// |θ − r| band used for the band-entry time in summaries [rad].
inline constexpr double kSummaryBand = 0.05;

/// Equilibrium the analysis predicts for a closed-loop scenario, next to
/// what the run ended at.
struct EquilibriumCheck {
    std::string basis;                  ///< which relation produced the prediction
    std::optional<double> theta_star;
    std::optional<double> sigma_star;
    double theta_observed = 0.0;
    std::optional<double> sigma_observed;
};

std::optional<EquilibriumCheck> equilibrium_check(const SessionRecord& record);
std::optional<double> summary_band_entry(const SessionRecord& record);

/// Human-readable run summary: outcome, metrics, predictions vs observed.
std::string summarize(const SessionRecord& record);

struct SweepRow {
    std::string value;
    Outcome outcome = Outcome::Completed;
    std::optional<PerfMetrics> metrics;
    std::optional<double> band_entry;
    std::string csv_name;
};

std::string sweep_table(const std::string& key, const std::vector<SweepRow>& rows);

}  // namespace pendlab
