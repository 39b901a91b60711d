#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <variant>

namespace pendlab {

/// One 10-bit conversion of the joystick potentiometer (0 V → 0, 5 V → 1023).
class AdcReading {
public:
    static constexpr int kMin = 0;
    static constexpr int kMax = 1023;

    /// Throws ConfigError when raw is outside [0, 1023].
    explicit AdcReading(int raw);
    int raw() const noexcept { return raw_; }

private:
    int raw_;
};

struct RangeMap {
    double lo;
    double hi;
};

inline constexpr RangeMap kReferenceRange{-std::numbers::pi, std::numbers::pi};

/// lo + (hi − lo)·raw/1023; exact at both endpoints.
double adc_to_range(AdcReading reading, RangeMap map);

/// First-order low-pass, y' = u + (y − u)·exp(−dt/τ_f).
struct LowPassState {
    double y = 0.0;
    double tau_f = 0.05; ///< [s]
};

LowPassState lowpass_step(LowPassState st, double u, double dt);

struct NoiseSpec {
    double input_std = 0.0;      ///< torque noise [N·m]
    double meas_theta_std = 0.0; ///< [rad]
    double meas_omega_std = 0.0; ///< [rad/s]
    std::uint64_t seed = 0;

    void validate() const;
};

struct NoiseSample {
    double input = 0.0;
    double theta = 0.0;
    double omega = 0.0;
};

/// Seeded Gaussian noise source with one independent stream per channel.
///
/// Each channel is an std::mt19937_64 seeded through std::seed_seq from
/// (seed, channel index); both are fully specified by the C++ standard.
/// Normal deviates use the Box–Muller cosine branch on two 53-bit uniforms,
/// one deviate per pair, so a recorded seed replays identically on any
/// conforming toolchain. A channel with zero std neither draws nor perturbs.
class NoiseStream {
public:
    explicit NoiseStream(const NoiseSpec& spec);

    NoiseSample sample();
    const NoiseSpec& spec() const noexcept { return spec_; }

private:
    NoiseSpec spec_;
    std::mt19937_64 input_;
    std::mt19937_64 theta_;
    std::mt19937_64 omega_;
};

/// Standard normal deviate from `engine` (Box–Muller, see NoiseStream).
double standard_normal(std::mt19937_64& engine);

struct NoDisturbance {};
struct ConstantDisturbance {
    double d0 = 0.0; ///< [N·m]
};
struct SineDisturbance {
    double amp = 0.0;   ///< [N·m]
    double freq = 1.0;  ///< [Hz]
    double phase = 0.0; ///< [rad]
};
using DisturbanceSpec = std::variant<NoDisturbance, ConstantDisturbance, SineDisturbance>;

void validate(const DisturbanceSpec& spec);
double disturbance_at(const DisturbanceSpec& spec, double t);

/// Live joystick; `initial_raw` is held until the first ADC frame arrives.
struct JoystickSource {
    int initial_raw = 512;
};
struct SineReference {
    double amp = 1.0;    ///< [rad]
    double freq = 0.2;   ///< [Hz]
    double offset = 0.0; ///< [rad]
};
struct ConstantReference {
    double r = std::numbers::pi;
};
using ReferenceSource = std::variant<JoystickSource, SineReference, ConstantReference>;

void validate(const ReferenceSource& src);

/// Raw reference clamped to [−π, π]. The joystick branch maps `latest_adc`
/// onto that range; low-pass conditioning is left to the caller.
double reference_at(const ReferenceSource& src, double t, AdcReading latest_adc);

}  // namespace pendlab
