#pragma once

// Closed-form statistics of the linearized pair-production stage and the
// Gaussian seed sampler that hands those statistics to the classical
// trajectory ensemble.
//
// In the linear regime the product modes obey a two-mode parametric
// amplifier: bosonic pairs grow as sinh^2(G t), fermionic pairs oscillate
// as sin^2(G t), with G the effective gain.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "abreact/rng.hpp"

namespace abreact {

enum class PairStatistics { Bosonic, Fermionic };

struct NoiseModel {
    double gain = 0.0;      // effective gain, units of lambda
    double coupling = 0.0;  // per-pair coupling G, units of lambda
    double n_a = 0.0;       // initial reactant atom number
    double n_b2 = 0.0;      // initial reactant dimer number
    // Effective self-interaction rates; carried for completeness, the
    // linearized formulas neglect them.
    double omega1 = 0.0;
    double omega2 = 0.0;
    PairStatistics statistics = PairStatistics::Bosonic;
};

// Builds a NoiseModel from the per-pair coupling and reactant numbers,
// gain = G sqrt(N_a N_b2).
inline NoiseModel make_noise_model(double coupling, double n_a, double n_b2,
                                   PairStatistics statistics,
                                   double omega1 = 0.0, double omega2 = 0.0) {
    if (n_a < 0.0 || n_b2 < 0.0)
        throw std::invalid_argument("make_noise_model: reactant numbers must be >= 0");
    NoiseModel m;
    m.coupling = coupling;
    m.n_a = n_a;
    m.n_b2 = n_b2;
    m.gain = std::abs(coupling) * std::sqrt(n_a * n_b2);
    m.omega1 = omega1;
    m.omega2 = omega2;
    m.statistics = statistics;
    return m;
}

// Effective gain after adiabatic elimination of the trimer,
// G = (lambda Omega / |delta|) sqrt(f_a f_b2) in reduced units.
// The total particle number cancels (G ~ lambda*Omega/(delta n) per pair,
// times n sqrt(f_a f_b2) pairs); it is kept in the signature so callers
// state the scale they work at.
inline double effective_gain(double lambda, double omega, double delta,
                             double f_a, double f_b2, double n_total) {
    if (delta == 0.0)
        throw std::domain_error("effective_gain: delta = 0 invalidates the adiabatic elimination");
    if (f_a < 0.0 || f_b2 < 0.0)
        throw std::invalid_argument("effective_gain: population fractions must be >= 0");
    if (n_total < 1.0)
        throw std::invalid_argument("effective_gain: n_total must be >= 1");
    return lambda * omega / std::abs(delta) * std::sqrt(f_a * f_b2);
}

// Vacuum-noise-induced pair population N_ab = N_b at time t.
inline double pair_population(const NoiseModel& model, double t) {
    if (t < 0.0) throw std::domain_error("pair_population: t must be >= 0");
    const double x = model.gain * t;
    if (model.statistics == PairStatistics::Bosonic) {
        const double s = std::sinh(x);
        return s * s;
    }
    const double s = std::sin(x);
    return s * s;
}

// Dimer-atom pair correlation C_ab = C_b.
inline double pair_correlation(const NoiseModel& model, double t) {
    if (t < 0.0) throw std::domain_error("pair_correlation: t must be >= 0");
    const double p = pair_population(model, t);
    return model.statistics == PairStatistics::Bosonic ? 1.0 + p : 1.0 - p;
}

// Mandel Q: cosh^2(Gt) bosonic (super-Poisson), cos^2(Gt) fermionic.
inline double mandel_q(const NoiseModel& model, double t) {
    if (t < 0.0) throw std::domain_error("mandel_q: t must be >= 0");
    const double x = model.gain * t;
    if (model.statistics == PairStatistics::Bosonic) {
        const double c = std::cosh(x);
        return c * c;
    }
    const double c = std::cos(x);
    return c * c;
}

// Cauchy-Schwarz excess [g2_ab,b]^2 - g2_ab g2_b = 1/sinh^2(Gt) + 4/sinh(Gt);
// positive for every finite t > 0 (nonclassical cross-correlation).
inline double cauchy_schwarz_excess(const NoiseModel& model, double t) {
    if (model.statistics != PairStatistics::Bosonic)
        throw std::domain_error("cauchy_schwarz_excess: defined for bosonic statistics only");
    if (t <= 0.0)
        throw std::domain_error("cauchy_schwarz_excess: singular at t <= 0");
    const double s = std::sinh(model.gain * t);
    return 1.0 / (s * s) + 4.0 / s;
}

struct SeedSample {
    std::complex<double> seed_ab;
    std::complex<double> seed_b;
    std::uint64_t rng_seed = 0;
};

// Two independent circularly-symmetric complex Gaussians with
// E[|seed|^2] = variance, fully determined by rng_seed.
inline SeedSample sample_seed(double variance, std::uint64_t rng_seed) {
    if (!(variance > 0.0))
        throw std::invalid_argument("sample_seed: variance must be > 0");
    SplitMix64 rng(rng_seed);
    const double scale = std::sqrt(variance / 2.0);
    const auto [x1, y1] = rng.next_normal_pair();
    const auto [x2, y2] = rng.next_normal_pair();
    SeedSample s;
    s.seed_ab = {scale * x1, scale * y1};
    s.seed_b = {scale * x2, scale * y2};
    s.rng_seed = rng_seed;
    return s;
}

}  // namespace abreact
