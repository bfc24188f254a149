#pragma once

// Noise-seeded trajectory ensembles: every trajectory owns an RNG stream
// derived from (master_seed, index), integrates independently, and the
// aggregation is an index-ordered reduction, so results are bit-identical
// for any worker count or scheduling order.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "abreact/integrator.hpp"
#include "abreact/noise_analytics.hpp"
#include "abreact/reaction_model.hpp"
#include "abreact/rng.hpp"

namespace abreact {

struct EnsembleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnsembleConfig {
    int n_traj = 300;
    std::uint64_t master_seed = 0;
    // E[|seed|^2] per product mode; 0 selects the truncated-Wigner default
    // of half a particle, 1 / (2 n_total).
    double seed_variance = 0.0;
    ModelParams params;
    double R = 0.5;
    IntegratorConfig integrator;
    int workers = 0;  // 0: ABREACT_WORKERS env var, else hardware concurrency

    double effective_seed_variance() const {
        return seed_variance > 0.0 ? seed_variance : 1.0 / (2.0 * params.n_total);
    }

    void validate() const {
        if (n_traj < 2) throw std::invalid_argument("EnsembleConfig: n_traj must be >= 2");
        if (seed_variance < 0.0)
            throw std::invalid_argument("EnsembleConfig: seed_variance must be >= 0");
        if (!(R > 0.0)) throw std::invalid_argument("EnsembleConfig: R must be > 0");
        params.validate();
        integrator.validate();
    }
};

struct EnsembleStats {
    std::vector<double> times;
    std::array<std::vector<double>, species::count> mean;
    std::array<std::vector<double>, species::count> stddev;  // unbiased, n-1
    // Pair cross-correlation Cov(N_ab, N_b)/sqrt(mean_ab mean_b) in
    // particle-number units; NaN where a product mean vanishes.
    std::vector<double> corr_ab_b;
    int n_traj = 0;
};

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ABREACT_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

struct TrajectoryFailure {
    int index = -1;
    std::string message;
};

}  // namespace detail

inline EnsembleStats run_ensemble(const EnsembleConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_traj;
    const int n_pts = cfg.integrator.report_points;
    const double variance = cfg.effective_seed_variance();

    std::vector<std::optional<TrajectoryResult>> results(n);
    std::vector<detail::TrajectoryFailure> failures_by_index(n);

    const auto run_one = [&](int k) {
        const SeedSample seed = sample_seed(variance, derive_seed(cfg.master_seed, k));
        const FieldState init = initial_state(cfg.R, seed.seed_ab, seed.seed_b);
        try {
            results[k] = integrate(init, cfg.params, cfg.integrator);
        } catch (const std::exception&) {
            // One retry at 10x tighter tolerance before counting as failed.
            IntegratorConfig tight = cfg.integrator;
            tight.rel_tol /= 10.0;
            tight.abs_tol /= 10.0;
            try {
                results[k] = integrate(init, cfg.params, tight);
            } catch (const std::exception& e2) {
                failures_by_index[k] = {k, e2.what()};
            }
        }
    };

    const int workers = std::min(resolve_workers(cfg.workers), n);
    if (workers <= 1) {
        for (int k = 0; k < n; ++k) run_one(k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) run_one(k);
            });
        for (auto& th : pool) th.join();
    }

    int n_failed = 0;
    const detail::TrajectoryFailure* first_failure = nullptr;
    for (const auto& f : failures_by_index)
        if (f.index >= 0) {
            ++n_failed;
            if (!first_failure) first_failure = &f;
        }
    if (n_failed > n / 100)
        throw EnsembleError("run_ensemble: " + std::to_string(n_failed) + " of " +
                            std::to_string(n) + " trajectories failed; first at trajectory " +
                            std::to_string(first_failure->index) + ": " + first_failure->message);

    EnsembleStats stats;
    stats.n_traj = n - n_failed;

    // Grid times are identical across trajectories; take them from the first
    // surviving one.
    for (const auto& r : results)
        if (r) {
            stats.times = r->times;
            break;
        }

    for (auto& m : stats.mean) m.assign(n_pts, 0.0);
    for (auto& s : stats.stddev) s.assign(n_pts, 0.0);
    stats.corr_ab_b.assign(n_pts, std::numeric_limits<double>::quiet_NaN());

    const double n_eff = static_cast<double>(stats.n_traj);
    for (int i = 0; i < species::count; ++i)
        for (int k = 0; k < n; ++k)
            if (results[k])
                for (int p = 0; p < n_pts; ++p)
                    stats.mean[i][p] += results[k]->populations[i][p];
    for (auto& m : stats.mean)
        for (auto& v : m) v /= n_eff;

    std::vector<double> cov_ab_b(n_pts, 0.0);
    for (int k = 0; k < n; ++k) {
        if (!results[k]) continue;
        const auto& pop = results[k]->populations;
        for (int p = 0; p < n_pts; ++p) {
            const double d_ab = pop[species::ab][p] - stats.mean[species::ab][p];
            const double d_b = pop[species::b][p] - stats.mean[species::b][p];
            cov_ab_b[p] += d_ab * d_b;
            for (int i = 0; i < species::count; ++i) {
                const double d = pop[i][p] - stats.mean[i][p];
                stats.stddev[i][p] += d * d;
            }
        }
    }
    for (auto& s : stats.stddev)
        for (auto& v : s) v = std::sqrt(v / (n_eff - 1.0));

    // Eq.-(5)-style correlation is per particle: scale fraction covariances
    // by n_total (cov gains n^2, the sqrt(N_ab N_b) denominator gains n).
    const double n_scale = cfg.params.n_total;
    for (int p = 0; p < n_pts; ++p) {
        const double denom = stats.mean[species::ab][p] * stats.mean[species::b][p];
        if (denom > 0.0)
            stats.corr_ab_b[p] = n_scale * (cov_ab_b[p] / (n_eff - 1.0)) / std::sqrt(denom);
    }
    return stats;
}

// Correlation at one grid index; requires both product means nonzero there.
inline double corr_at(const EnsembleStats& stats, int idx) {
    if (idx < 0 || idx >= static_cast<int>(stats.corr_ab_b.size()))
        throw std::out_of_range("corr_at: grid index out of range");
    const double v = stats.corr_ab_b[idx];
    if (std::isnan(v))
        throw std::domain_error("corr_at: correlation undefined where a product mean is 0");
    return v;
}

// Ratio of the ensemble-mean product population at t_probe to the linearized
// prediction v (1 + 2 sinh^2(G t)) = v cosh(2 G t); validates the
// quantum-noise-to-classical-seed handoff. Requires G t_probe < 0.3.
inline double short_time_check(const EnsembleConfig& cfg, double t_probe) {
    cfg.validate();
    if (t_probe < 0.0) throw std::domain_error("short_time_check: t_probe must be >= 0");
    if (t_probe == 0.0) return 1.0;  // both sides equal the seed variance

    const double f_b2 = 1.0 / (2.0 * (1.0 + cfg.R));
    const double f_a = cfg.R / (1.0 + cfg.R);
    const double omega = rabi_pulse(cfg.params, 0.0);
    const double gain =
        effective_gain(cfg.params.lambda, omega, cfg.params.delta, f_a, f_b2, cfg.params.n_total);
    if (!(gain * t_probe < 0.3))
        throw std::domain_error("short_time_check: G t = " + std::to_string(gain * t_probe) +
                                " is outside the linearized regime (< 0.3)");

    EnsembleConfig probe = cfg;
    probe.integrator.t_end = t_probe;
    probe.integrator.report_points = 2;
    const EnsembleStats stats = run_ensemble(probe);

    const double variance = cfg.effective_seed_variance();
    const double s = std::sinh(gain * t_probe);
    const double prediction = variance * (1.0 + 2.0 * s * s);
    return stats.mean[species::ab].back() / prediction;
}

}  // namespace abreact
