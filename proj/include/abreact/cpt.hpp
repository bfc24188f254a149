#pragma once

// Coherent-population-trapping steady state of the reaction under two-photon
// resonance, its optimum over the initial ratio, and the adiabatic-following
// monitor for the pulsed drive.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "abreact/reaction_model.hpp"

namespace abreact {

struct PulseVanished : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CptPoint {
    double ratio = 0.0;             // initial ratio R = N_a(0) / 2 N_b2(0)
    double omega_over_lambda = 0.0;
    double n_ab_s = 0.0;            // steady-state product fraction, <= 1/3
};

// Steady-state product fraction
//   N_ab^s = 2R / { (1+R) [ 1 + 2R + sqrt((1-2R)^2 + 8R (Omega/lambda)^2) ] }.
inline double cpt_steady_state(double R, double omega_over_lambda) {
    if (!(R > 0.0)) throw std::invalid_argument("cpt_steady_state: R must be > 0");
    if (omega_over_lambda < 0.0)
        throw std::invalid_argument("cpt_steady_state: omega_over_lambda must be >= 0");
    const double x = omega_over_lambda;
    const double disc = (1.0 - 2.0 * R) * (1.0 - 2.0 * R) + 8.0 * R * x * x;
    return 2.0 * R / ((1.0 + R) * (1.0 + 2.0 * R + std::sqrt(disc)));
}

// Maximizer of cpt_steady_state over R in (0, 1e3]: coarse grid scan for a
// unimodal bracket, then golden-section to 1e-9 in R.
inline std::pair<double, double> optimal_ratio(double omega_over_lambda) {
    if (omega_over_lambda < 0.0)
        throw std::invalid_argument("optimal_ratio: omega_over_lambda must be >= 0");
    const auto f = [&](double R) { return cpt_steady_state(R, omega_over_lambda); };

    constexpr double r_min = 1e-6, r_max = 1e3;
    constexpr int n_scan = 2000;
    double best_r = r_min, best_v = f(r_min);
    for (int i = 1; i <= n_scan; ++i) {
        // log-spaced scan; the optimum sits at O(1) ratios
        const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / n_scan);
        const double v = f(r);
        if (v > best_v) {
            best_v = v;
            best_r = r;
        }
    }
    double lo = best_r / 1.05, hi = std::min(best_r * 1.05, r_max);

    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double r_star = 0.5 * (a + b);
    return {r_star, f(r_star)};
}

// Adiabaticity monitor gamma_nl = |d(eta)/dt| / [(1 + eta) 4 lambda] with
// eta = lambda / Omega(t); for the sech pulse d(eta)/dt is evaluated
// analytically: (lambda/Omega0) sinh((t-t0)/tau) / tau.
inline double adiabaticity_monitor(const ModelParams& params, double t) {
    if (!(params.lambda > 0.0))
        throw std::invalid_argument("adiabaticity_monitor: lambda must be > 0");
    const double omega = rabi_pulse(params, t);
    if (!(omega > 0.0) || !std::isfinite(params.lambda / omega))
        throw PulseVanished("adiabaticity_monitor: Omega(t) vanished, eta unbounded");
    const double u = (t - params.pulse_center) / params.tau;
    const double eta = params.lambda / omega;
    const double eta_dot = params.lambda / params.omega0 * std::sinh(u) / params.tau;
    return std::abs(eta_dot) / ((1.0 + eta) * 4.0 * params.lambda);
}

}  // namespace abreact
