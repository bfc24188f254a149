#pragma once

// Adaptive Dormand-Prince 5(4) propagation of the five-mode amplitude vector
// with PI step-size control, cubic Hermite sampling onto a uniform report
// grid, and conserved-charge bookkeeping. Deterministic: identical inputs
// step identically.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "abreact/reaction_model.hpp"

namespace abreact {

struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-11;
    double t_end = 100.0;
    int report_points = 1001;
    double max_step = std::numeric_limits<double>::infinity();
    bool fixed_step = false;  // step with h = max_step, no error control

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol <= 1e-3) || !(abs_tol > 0.0 && abs_tol <= 1e-3))
            throw std::invalid_argument("IntegratorConfig: tolerances must lie in (0, 1e-3]");
        if (report_points < 2)
            throw std::invalid_argument("IntegratorConfig: report_points must be >= 2");
        if (!(t_end > 0.0)) throw std::invalid_argument("IntegratorConfig: t_end must be > 0");
        if (!(max_step > 0.0)) throw std::invalid_argument("IntegratorConfig: max_step must be > 0");
        if (fixed_step && !std::isfinite(max_step))
            throw std::invalid_argument("IntegratorConfig: fixed_step requires finite max_step");
    }
};

struct TrajectoryResult {
    std::vector<double> times;
    std::array<std::vector<double>, species::count> populations;  // N_a..N_t
    std::vector<double> q_a;
    std::vector<double> q_b;
    FieldState final_state;
};

namespace detail {

inline Amplitudes axpy(const Amplitudes& y, double h, const Amplitudes& k) {
    Amplitudes r;
    for (int i = 0; i < species::count; ++i) r[i] = y[i] + h * k[i];
    return r;
}

// Hermite cubic through (y0, f0) and (y1, f1) at fraction theta of the step.
inline Amplitudes hermite(const Amplitudes& y0, const Amplitudes& f0, const Amplitudes& y1,
                          const Amplitudes& f1, double h, double theta) {
    const double t2 = theta * theta;
    const double h00 = (1.0 + 2.0 * theta) * (1.0 - theta) * (1.0 - theta);
    const double h10 = theta * (1.0 - theta) * (1.0 - theta);
    const double h01 = t2 * (3.0 - 2.0 * theta);
    const double h11 = t2 * (theta - 1.0);
    Amplitudes r;
    for (int i = 0; i < species::count; ++i)
        r[i] = h00 * y0[i] + (h * h10) * f0[i] + h01 * y1[i] + (h * h11) * f1[i];
    return r;
}

// Dormand-Prince coefficients.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // Difference between the 5th- and embedded 4th-order weights.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

// Adaptive integration of dy/dt = rhs(y, t) from (y0, t0) to t0 + cfg.t_end
// with per-point sampling via `observer(idx, t, y)` on the uniform grid.
// `rhs` must be a pure function of (y, t).
template <typename Rhs, typename Observer>
void integrate_ode(Rhs&& rhs, const Amplitudes& y0, double t0, const IntegratorConfig& cfg,
                   Observer&& observer) {
    using D = detail::Dopri5;
    cfg.validate();
    if (!all_finite(y0)) throw NonFiniteState("integrate: initial state is not finite");

    const double t_final = t0 + cfg.t_end;
    const int n_report = cfg.report_points;
    const auto report_time = [&](int i) {
        return t0 + cfg.t_end * (static_cast<double>(i) / (n_report - 1));
    };

    const auto error_norm = [&](const Amplitudes& y_old, const Amplitudes& y_new,
                                const Amplitudes& err) {
        double sum = 0.0;
        for (int i = 0; i < species::count; ++i) {
            const double sc_re = cfg.abs_tol +
                cfg.rel_tol * std::max(std::abs(y_old[i].real()), std::abs(y_new[i].real()));
            const double sc_im = cfg.abs_tol +
                cfg.rel_tol * std::max(std::abs(y_old[i].imag()), std::abs(y_new[i].imag()));
            const double er = err[i].real() / sc_re;
            const double ei = err[i].imag() / sc_im;
            sum += er * er + ei * ei;
        }
        return std::sqrt(sum / (2.0 * species::count));
    };

    double t = t0;
    Amplitudes y = y0;
    Amplitudes f = rhs(y, t);  // FSAL slot

    // Starting step: conservative fraction of the time scale set by |y|/|f|.
    double h;
    if (cfg.fixed_step) {
        h = cfg.max_step;
    } else {
        double ny = 0.0, nf = 0.0;
        for (int i = 0; i < species::count; ++i) {
            ny = std::max({ny, std::abs(y[i].real()), std::abs(y[i].imag())});
            nf = std::max({nf, std::abs(f[i].real()), std::abs(f[i].imag())});
        }
        h = (nf > 0.0 && ny > 0.0) ? 0.01 * ny / nf : 1e-4 * cfg.t_end;
        h = std::min({h, cfg.max_step, cfg.t_end});
    }

    int next_report = 0;
    if (report_time(0) <= t) {
        observer(0, t, y);
        next_report = 1;
    }

    double err_prev = 1e-4;  // PI controller memory
    constexpr double kSafety = 0.9, kAlpha = 0.17, kBeta = 0.04;

    while (t < t_final) {
        const double h_left = t_final - t;
        if (h > h_left) h = h_left;
        if (!cfg.fixed_step && h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw StepSizeUnderflow("integrate: step size underflow at t = " + std::to_string(t));

        const Amplitudes k1 = f;
        const Amplitudes k2 = rhs(detail::axpy(y, h * D::a21, k1), t + D::c2 * h);
        Amplitudes tmp;
        for (int i = 0; i < species::count; ++i)
            tmp[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
        const Amplitudes k3 = rhs(tmp, t + D::c3 * h);
        for (int i = 0; i < species::count; ++i)
            tmp[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
        const Amplitudes k4 = rhs(tmp, t + D::c4 * h);
        for (int i = 0; i < species::count; ++i)
            tmp[i] = y[i] + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
        const Amplitudes k5 = rhs(tmp, t + D::c5 * h);
        for (int i = 0; i < species::count; ++i)
            tmp[i] = y[i] + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] +
                                 D::a64 * k4[i] + D::a65 * k5[i]);
        const Amplitudes k6 = rhs(tmp, t + h);

        Amplitudes y_new;
        for (int i = 0; i < species::count; ++i)
            y_new[i] = y[i] + h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] +
                                   D::b5 * k5[i] + D::b6 * k6[i]);
        const double t_new = t + h;
        const Amplitudes k7 = rhs(y_new, t_new);

        if (!all_finite(y_new) || !all_finite(k7))
            throw NonFiniteState("integrate: non-finite state at t = " + std::to_string(t_new));

        double err = 0.0;
        if (!cfg.fixed_step) {
            Amplitudes e;
            for (int i = 0; i < species::count; ++i)
                e[i] = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] +
                            D::e6 * k6[i] + D::e7 * k7[i]);
            err = error_norm(y, y_new, e);
        }

        if (cfg.fixed_step || err <= 1.0) {
            // Accepted: sample every report instant inside this step.
            while (next_report < n_report) {
                const double tr = report_time(next_report);
                if (tr > t_new) break;
                const double theta = std::clamp((tr - t) / h, 0.0, 1.0);
                observer(next_report, tr, detail::hermite(y, k1, y_new, k7, h, theta));
                ++next_report;
            }
            t = t_new;
            y = y_new;
            f = k7;
            if (!cfg.fixed_step) {
                const double safe_err = std::max(err, 1e-10);
                double fac = kSafety * std::pow(safe_err, -kAlpha) * std::pow(err_prev, kBeta);
                fac = std::clamp(fac, 0.2, 10.0);
                h = std::min(h * fac, cfg.max_step);
                err_prev = safe_err;
            }
        } else {
            h *= std::max(0.2, kSafety * std::pow(err, -0.2));
        }
    }

    // The final step lands on t_final up to rounding; flush whatever remains.
    while (next_report < n_report) {
        observer(next_report, report_time(next_report), y);
        ++next_report;
    }
}

// Integrates the reaction model, sampling populations and charges on the
// uniform report grid; selects the bosonic or Bose-Fermi right-hand side
// from params.statistics.
inline TrajectoryResult integrate(const FieldState& initial, const ModelParams& params,
                                  const IntegratorConfig& cfg) {
    params.validate();
    TrajectoryResult res;
    res.times.resize(cfg.report_points);
    for (auto& p : res.populations) p.resize(cfg.report_points);
    res.q_a.resize(cfg.report_points);
    res.q_b.resize(cfg.report_points);

    Amplitudes last{};
    double last_t = initial.t;
    integrate_ode(
        [&params](const Amplitudes& y, double t) { return rhs(y, params, t); }, initial.psi,
        initial.t, cfg, [&](int idx, double t, const Amplitudes& y) {
            res.times[idx] = t;
            for (int i = 0; i < species::count; ++i) res.populations[i][idx] = std::norm(y[i]);
            const auto q = conserved_charges(y);
            res.q_a[idx] = q.q_a;
            res.q_b[idx] = q.q_b;
            last = y;
            last_t = t;
        });
    res.final_state = FieldState{last, last_t};
    return res;
}

// Re-runs with 10x tighter tolerances and reports the largest population
// difference on the grid; certifies that cfg's tolerances are adequate.
inline double convergence_probe(const FieldState& initial, const ModelParams& params,
                                const IntegratorConfig& cfg) {
    IntegratorConfig tight = cfg;
    tight.rel_tol = cfg.rel_tol / 10.0;
    tight.abs_tol = cfg.abs_tol / 10.0;
    const TrajectoryResult base = integrate(initial, params, cfg);
    const TrajectoryResult ref = integrate(initial, params, tight);
    double worst = 0.0;
    for (int i = 0; i < species::count; ++i)
        for (int k = 0; k < cfg.report_points; ++k)
            worst = std::max(worst, std::abs(base.populations[i][k] - ref.populations[i][k]));
    return worst;
}

}  // namespace abreact
