#pragma once

// Order-of-magnitude feasibility check: the reaction is fluctuation-dominated
// when the inelastic collision rate stays below the parametric gain, whose
// inverse bounds the noise-dominated window through |G t| < 1.

#include <stdexcept>

#include "abreact/noise_analytics.hpp"
#include "abreact/reaction_model.hpp"

namespace abreact {

struct FeasibilityReport {
    double gain_physical = 0.0;         // effective gain in s^-1
    double max_permissible_rate = 0.0;  // s^-1
    double inelastic_rate = 0.0;        // s^-1
    bool dominated_by_fluctuations = false;
};

inline constexpr double cm3_to_m3_density(double per_cm3) { return per_cm3 * 1e6; }

// density in m^-3, rate_coeff in m^3/s. Omega enters at its peak value.
inline FeasibilityReport assess(const ModelParams& params, double f_a, double f_b2,
                                double density, double rate_coeff) {
    if (!(density > 0.0)) throw std::invalid_argument("assess: density must be > 0");
    if (rate_coeff < 0.0) throw std::invalid_argument("assess: rate_coeff must be >= 0");
    if (!(params.lambda_physical > 0.0))
        throw std::invalid_argument("assess: physical lambda must be > 0");

    const double gain_reduced =
        effective_gain(params.lambda, params.omega0, params.delta, f_a, f_b2, params.n_total);
    FeasibilityReport r;
    r.gain_physical = gain_reduced * params.lambda_physical;
    r.max_permissible_rate = r.gain_physical;
    r.inelastic_rate = rate_coeff * density;
    r.dominated_by_fluctuations = r.inelastic_rate < r.max_permissible_rate;
    return r;
}

}  // namespace abreact
