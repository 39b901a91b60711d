#include "pendlab/integrators.hpp"

#include <cmath>
#include <sstream>

#include "pendlab/errors.hpp"

namespace pendlab {

StepSize::StepSize(double dt) : dt_(dt) {
    if (!(std::isfinite(dt) && dt > 0.0 && dt <= kMax)) {
        throw ConfigError("step size must satisfy 0 < dt <= 0.1", "dt");
    }
}

namespace {

std::string describe(const SimState& s) {
    std::ostringstream out;
    out << "integration diverged at t=" << s.t << " (theta=" << s.theta << ", omega=" << s.omega << ")";
    return out.str();
}

}  // namespace

IntegrationDiverged::IntegrationDiverged(const SimState& offending)
    : std::runtime_error(describe(offending)), state_(offending) {}

void check_divergence(const SimState& next) {
    if (!std::isfinite(next.theta) || !std::isfinite(next.omega) || !std::isfinite(next.t) ||
        std::abs(next.omega) > kDivergenceOmega) {
        throw IntegrationDiverged(next);
    }
}

std::string_view to_string(IntegratorKind kind) {
    return kind == IntegratorKind::Euler ? "euler" : "rk4";
}

}  // namespace pendlab
