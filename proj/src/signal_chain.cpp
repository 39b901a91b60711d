#include "pendlab/signal_chain.hpp"

#include <algorithm>
#include <cmath>

#include "pendlab/errors.hpp"

namespace pendlab {

AdcReading::AdcReading(int raw) : raw_(raw) {
    if (raw < kMin || raw > kMax) throw ConfigError("ADC count out of range [0, 1023]", "raw");
}

double adc_to_range(AdcReading reading, RangeMap map) {
    if (reading.raw() == AdcReading::kMax) return map.hi;
    return map.lo + (map.hi - map.lo) * static_cast<double>(reading.raw()) / AdcReading::kMax;
}

LowPassState lowpass_step(LowPassState st, double u, double dt) {
    const double decay = std::exp(-dt / st.tau_f);
    st.y = u + (st.y - u) * decay;
    return st;
}

void NoiseSpec::validate() const {
    if (!(input_std >= 0.0 && std::isfinite(input_std))) throw ConfigError("std must be >= 0", "noise.input_std");
    if (!(meas_theta_std >= 0.0 && std::isfinite(meas_theta_std)))
        throw ConfigError("std must be >= 0", "noise.meas_theta_std");
    if (!(meas_omega_std >= 0.0 && std::isfinite(meas_omega_std)))
        throw ConfigError("std must be >= 0", "noise.meas_omega_std");
}

namespace {

std::mt19937_64 channel_engine(std::uint64_t seed, std::uint32_t channel) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), channel};
    return std::mt19937_64(seq);
}

double unit_open_closed(std::mt19937_64& engine) {
    // (0, 1]: never zero, so log() below stays finite.
    return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
}

double draw(std::mt19937_64& engine, double std_dev) {
    return std_dev == 0.0 ? 0.0 : std_dev * standard_normal(engine);
}

}  // namespace

double standard_normal(std::mt19937_64& engine) {
    const double u1 = unit_open_closed(engine);
    const double u2 = unit_open_closed(engine);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoiseStream::NoiseStream(const NoiseSpec& spec)
    : spec_(spec),
      input_(channel_engine(spec.seed, 0)),
      theta_(channel_engine(spec.seed, 1)),
      omega_(channel_engine(spec.seed, 2)) {}

NoiseSample NoiseStream::sample() {
    return {draw(input_, spec_.input_std), draw(theta_, spec_.meas_theta_std), draw(omega_, spec_.meas_omega_std)};
}

void validate(const DisturbanceSpec& spec) {
    if (const auto* c = std::get_if<ConstantDisturbance>(&spec); c && !std::isfinite(c->d0)) {
        throw ConfigError("must be finite", "disturbance.d0");
    }
    if (const auto* s = std::get_if<SineDisturbance>(&spec)) {
        if (!(s->amp >= 0.0 && std::isfinite(s->amp))) throw ConfigError("must be >= 0", "disturbance.amp");
        if (!(s->freq > 0.0 && std::isfinite(s->freq))) throw ConfigError("must be > 0", "disturbance.freq");
        if (!std::isfinite(s->phase)) throw ConfigError("must be finite", "disturbance.phase");
    }
}

double disturbance_at(const DisturbanceSpec& spec, double t) {
    struct Visitor {
        double t;
        double operator()(const NoDisturbance&) const { return 0.0; }
        double operator()(const ConstantDisturbance& c) const { return c.d0; }
        double operator()(const SineDisturbance& s) const {
            return s.amp * std::sin(2.0 * std::numbers::pi * s.freq * t + s.phase);
        }
    };
    return std::visit(Visitor{t}, spec);
}

void validate(const ReferenceSource& src) {
    if (const auto* j = std::get_if<JoystickSource>(&src)) {
        (void)AdcReading(j->initial_raw);
    }
    if (const auto* s = std::get_if<SineReference>(&src)) {
        if (!(s->amp >= 0.0 && std::isfinite(s->amp))) throw ConfigError("must be >= 0", "reference.amp");
        if (!(s->freq > 0.0 && std::isfinite(s->freq))) throw ConfigError("must be > 0", "reference.freq");
        if (!std::isfinite(s->offset)) throw ConfigError("must be finite", "reference.offset");
    }
    if (const auto* c = std::get_if<ConstantReference>(&src); c && !std::isfinite(c->r)) {
        throw ConfigError("must be finite", "reference.value");
    }
}

double reference_at(const ReferenceSource& src, double t, AdcReading latest_adc) {
    struct Visitor {
        double t;
        AdcReading adc;
        double operator()(const JoystickSource&) const { return adc_to_range(adc, kReferenceRange); }
        double operator()(const SineReference& s) const {
            return s.offset + s.amp * std::sin(2.0 * std::numbers::pi * s.freq * t);
        }
        double operator()(const ConstantReference& c) const { return c.r; }
    };
    const double raw = std::visit(Visitor{t, latest_adc}, src);
    return std::clamp(raw, kReferenceRange.lo, kReferenceRange.hi);
}

}  // namespace pendlab
