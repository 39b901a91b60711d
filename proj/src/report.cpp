#include "pendlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pendlab/analysis.hpp"

namespace pendlab {

namespace {

std::string fixed(double value, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

std::string or_dash(const std::optional<double>& value, int digits = 6) {
    return value ? fixed(*value, digits) : std::string("-");
}

}  // namespace

std::optional<EquilibriumCheck> equilibrium_check(const SessionRecord& record) {
    const auto& c = record.config;
    if (c.mode != Mode::ClosedLoopReference || record.frames.empty()) return std::nullopt;
    const TelemetryFrame& last = record.frames.back();
    const double r = last.r;

    EquilibriumCheck check;
    check.theta_observed = last.theta;
    double d0 = 0.0;
    bool constant_disturbance = true;
    if (auto* d = std::get_if<ConstantDisturbance>(&c.disturbance)) d0 = d->d0;
    else if (std::holds_alternative<SineDisturbance>(c.disturbance)) constant_disturbance = false;

    if (auto* g = std::get_if<BangBangGains>(&c.controller)) {
        check.basis = "bang-bang rests only at theta = r";
        if (gravity_scale(c.params) * std::abs(std::sin(r)) + std::abs(d0) < g->tau_max) check.theta_star = r;
    } else if (std::holds_alternative<PGains>(c.controller) || std::holds_alternative<PDGains>(c.controller)) {
        const double kp = std::holds_alternative<PGains>(c.controller) ? std::get<PGains>(c.controller).kp
                                                                       : std::get<PDGains>(c.controller).kp;
        check.basis = "kp (r - theta) = m g l sin(theta)";
        if (d0 != 0.0) check.basis += " (disturbance ignored)";
        try {
            check.theta_star = p_equilibrium(c.params, kp, r).theta_star;
        } catch (const NoEquilibriumError&) {
        }
    } else if (std::holds_alternative<PIDGains>(c.controller)) {
        check.basis = "theta = r, sigma = m g l sin(r) - d0";
        const auto eq = pid_equilibrium(c.params, r, d0);
        check.theta_star = eq.theta_star;
        if (constant_disturbance) check.sigma_star = eq.sigma_star;
        check.sigma_observed = record.final_integral;
    } else {
        check.basis = "fractional integral action drives theta to r";
        check.theta_star = r;
    }
    return check;
}

std::optional<double> summary_band_entry(const SessionRecord& record) {
    if (record.config.mode != Mode::ClosedLoopReference || record.frames.empty()) return std::nullopt;
    std::vector<double> t, theta, r;
    for (const auto& f : record.frames) {
        t.push_back(f.t);
        theta.push_back(f.theta);
        r.push_back(f.r);
    }
    return band_entry_time(t, theta, r, kSummaryBand);
}

std::string summarize(const SessionRecord& record) {
    std::ostringstream out;
    const auto& c = record.config;
    out << "outcome: " << to_string(record.outcome) << "\n";
    if (!record.diagnostic.empty()) out << "diagnostic: " << record.diagnostic << "\n";
    out << "mode: " << to_string(c.mode) << "\n";
    if (c.mode == Mode::ClosedLoopReference) out << "controller: " << controller_name(c.controller) << "\n";
    out << "friction b: " << fixed(c.params.b) << " N m s\n";
    out << "frames: " << record.frames.size() << "\n";
    if (!record.frames.empty()) {
        const auto& last = record.frames.back();
        out << "final: t = " << fixed(last.t) << " s, theta = " << fixed(last.theta, 9)
            << " rad, omega = " << fixed(last.omega, 6) << " rad/s\n";
    }
    if (record.metrics) {
        const auto& m = *record.metrics;
        out << "overshoot: " << fixed(m.overshoot) << " rad\n";
        out << "settling time (2%): " << (m.settling_time_2pct ? fixed(*m.settling_time_2pct) + " s" : "not settled")
            << "\n";
        out << "rms error (final 20%): " << fixed(m.rms_error) << " rad\n";
        out << "steady-state error (final 10%): " << fixed(m.steady_state_error) << " rad\n";
    }
    if (c.mode == Mode::ClosedLoopReference && !record.frames.empty()) {
        const auto entry = summary_band_entry(record);
        out << "band entry (|theta - r| < " << fixed(kSummaryBand) << " rad): "
            << (entry ? fixed(*entry) + " s" : "never") << "\n";
    }
    if (auto check = equilibrium_check(record)) {
        out << "equilibrium (" << check->basis << "):\n";
        out << "  theta predicted: " << or_dash(check->theta_star, 9) << " rad, observed: "
            << fixed(check->theta_observed, 9) << " rad\n";
        if (check->sigma_observed)
            out << "  sigma predicted: " << or_dash(check->sigma_star, 9) << " N m, observed: "
                << fixed(*check->sigma_observed, 9) << " N m\n";
    }
    return out.str();
}

std::string sweep_table(const std::string& key, const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-10s %-12s %-14s %-12s %-12s %-12s\n", key.c_str(), "outcome",
                  "overshoot", "settling_2pct", "rms_error", "ss_error", "band_entry");
    out << line;
    for (const auto& row : rows) {
        std::string overshoot = "-", settle = "-", rms = "-", sse = "-";
        if (row.metrics) {
            overshoot = fixed(row.metrics->overshoot, 5);
            settle = row.metrics->settling_time_2pct ? fixed(*row.metrics->settling_time_2pct, 5) : "not-settled";
            rms = fixed(row.metrics->rms_error, 5);
            sse = fixed(row.metrics->steady_state_error, 5);
        }
        std::snprintf(line, sizeof line, "%-14s %-10s %-12s %-14s %-12s %-12s %-12s\n", row.value.c_str(),
                      std::string(to_string(row.outcome)).c_str(), overshoot.c_str(), settle.c_str(), rms.c_str(),
                      sse.c_str(), or_dash(row.band_entry, 5).c_str());
        out << line;
    }
    return out.str();
}

}  // namespace pendlab
