#pragma once

// Mean-field model of the collective abstraction reaction A + B2 -> AB + B:
// five coupled complex amplitudes (a, b, b2, ab, t) in reduced units where
// rates are measured in lambda and |psi_i|^2 is a population fraction
// normalized so the total constituent-atom charge is 1.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace abreact {

using Complex = std::complex<double>;
using Amplitudes = std::array<Complex, 5>;

// Species indices, fixed ordering (a, b, b2, ab, t).
namespace species {
inline constexpr int a = 0;
inline constexpr int b = 1;
inline constexpr int b2 = 2;
inline constexpr int ab = 3;
inline constexpr int t = 4;
inline constexpr int count = 5;
}  // namespace species

enum class Statistics { AllBosonic, BoseFermi };

using ChiMatrix = std::array<std::array<double, 5>, 5>;

// Rb-K collision parameters in units of lambda (density already folded in);
// channels involving molecules are not known and take the common value.
inline ChiMatrix default_chi() {
    ChiMatrix chi{};
    for (auto& row : chi) row.fill(0.0938);
    chi[species::a][species::a] = 0.5303;
    chi[species::b][species::b] = 0.3214;
    chi[species::a][species::b] = 0.8731;
    chi[species::b][species::a] = 0.8731;
    return chi;
}

struct ModelParams {
    double lambda = 1.0;          // reduced atom-dimer coupling used in the EOM
    double lambda_physical = 4.718e4;  // same coupling in s^-1, for feasibility math
    double omega0 = 0.0;          // peak Rabi rate, units of lambda
    double tau = 1.0;             // pulse width, units of 1/lambda
    double pulse_center = 0.0;    // pulse peak instant t0
    double delta = 0.0;           // one-photon detuning
    double Delta = 0.0;           // second detuning; Delta = -delta is two-photon resonance
    double gamma = 0.0;           // trimer decay rate
    ChiMatrix chi = default_chi();
    Statistics statistics = Statistics::AllBosonic;
    double kinetic_ab = 0.0;      // A_ab of the Bose-Fermi variant
    double kinetic_b = 0.0;       // A_b of the Bose-Fermi variant
    double n_total = 1e5;         // total constituent-atom number (seed-variance scale)

    void validate() const {
        if (!(tau > 0.0)) throw std::invalid_argument("ModelParams: tau must be > 0");
        if (omega0 < 0.0) throw std::invalid_argument("ModelParams: omega0 must be >= 0");
        if (gamma < 0.0) throw std::invalid_argument("ModelParams: gamma must be >= 0");
        if (!(n_total >= 1.0)) throw std::invalid_argument("ModelParams: n_total must be >= 1");
        for (int i = 0; i < species::count; ++i)
            for (int j = i + 1; j < species::count; ++j)
                if (chi[i][j] != chi[j][i])
                    throw std::invalid_argument("ModelParams: chi must be symmetric");
        if (statistics == Statistics::BoseFermi && !(kinetic_ab > 0.0 && kinetic_b > 0.0))
            throw std::invalid_argument(
                "ModelParams: BoseFermi statistics requires kinetic_ab, kinetic_b > 0");
    }
};

struct FieldState {
    Amplitudes psi{};
    double t = 0.0;
};

struct ConservedCharges {
    double q_a = 0.0;  // A-atom fraction
    double q_b = 0.0;  // B-atom fraction
    double total() const { return q_a + q_b; }
};

inline bool all_finite(const Amplitudes& psi) {
    for (const auto& c : psi)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// Omega(t) = Omega0 sech((t - t0)/tau).
inline double rabi_pulse(const ModelParams& params, double t) {
    return params.omega0 / std::cosh((t - params.pulse_center) / params.tau);
}

namespace detail {

inline std::array<double, 5> populations_of(const Amplitudes& psi) {
    std::array<double, 5> n;
    for (int i = 0; i < species::count; ++i) n[i] = std::norm(psi[i]);
    return n;
}

}  // namespace detail

// Right-hand side of the bosonic equations of motion:
//   dpsi_a  = 2i sum_j chi_aj |psi_j|^2 psi_a  + i lambda conj(psi_b2) psi_t
//   dpsi_b  = 2i sum_j chi_bj |psi_j|^2 psi_b  - i Omega  conj(psi_ab) psi_t
//   dpsi_b2 = 2i sum_j chi_b2j|psi_j|^2 psi_b2 + i lambda conj(psi_a)  psi_t
//   dpsi_ab = 2i sum_j chi_abj|psi_j|^2 psi_ab - i Omega  conj(psi_b)  psi_t + i(Delta+delta) psi_ab
//   dpsi_t  = 2i sum_j chi_tj |psi_j|^2 psi_t  + (i delta - gamma) psi_t
//             + i lambda psi_a psi_b2 - i Omega psi_b psi_ab
inline Amplitudes rhs_bosonic(const Amplitudes& psi, const ModelParams& params, double t) {
    using namespace species;
    constexpr Complex I{0.0, 1.0};
    const auto n = detail::populations_of(psi);
    const double omega = rabi_pulse(params, t);

    Amplitudes d;
    for (int i = 0; i < count; ++i) {
        double shift = 0.0;
        for (int j = 0; j < count; ++j) shift += params.chi[i][j] * n[j];
        d[i] = 2.0 * I * shift * psi[i];
    }
    d[a] += I * params.lambda * std::conj(psi[b2]) * psi[t];
    d[b] -= I * omega * std::conj(psi[ab]) * psi[t];
    d[b2] += I * params.lambda * std::conj(psi[a]) * psi[t];
    d[ab] += -I * omega * std::conj(psi[b]) * psi[t] + I * (params.Delta + params.delta) * psi[ab];
    d[t] += (I * params.delta - params.gamma) * psi[t] + I * params.lambda * psi[a] * psi[b2] -
            I * omega * psi[b] * psi[ab];
    return d;
}

// Bose-Fermi variant: the products AB and B are fermions. Their s-wave
// collision channels are dropped and the self term chi_jj |psi_j|^2 is
// replaced by the kinetic-pressure term A_j |psi_j|^(4/3).
inline Amplitudes rhs_bose_fermi(const Amplitudes& psi, const ModelParams& params, double t) {
    using namespace species;
    constexpr Complex I{0.0, 1.0};
    if (params.statistics != Statistics::BoseFermi)
        throw std::invalid_argument("rhs_bose_fermi: params.statistics must be BoseFermi");
    const auto n = detail::populations_of(psi);
    const double omega = rabi_pulse(params, t);
    const auto is_fermion = [](int i) { return i == b || i == ab; };

    Amplitudes d;
    for (int i = 0; i < count; ++i) {
        double shift = 0.0;
        if (is_fermion(i)) {
            const double a_j = (i == b) ? params.kinetic_b : params.kinetic_ab;
            shift = a_j * std::cbrt(n[i] * n[i]);  // |psi|^(4/3)
        } else {
            for (int j = 0; j < count; ++j)
                if (!is_fermion(j)) shift += params.chi[i][j] * n[j];
        }
        d[i] = 2.0 * I * shift * psi[i];
    }
    d[a] += I * params.lambda * std::conj(psi[b2]) * psi[t];
    d[b] -= I * omega * std::conj(psi[ab]) * psi[t];
    d[b2] += I * params.lambda * std::conj(psi[a]) * psi[t];
    d[ab] += -I * omega * std::conj(psi[b]) * psi[t] + I * (params.Delta + params.delta) * psi[ab];
    d[t] += (I * params.delta - params.gamma) * psi[t] + I * params.lambda * psi[a] * psi[b2] -
            I * omega * psi[b] * psi[ab];
    return d;
}

inline Amplitudes rhs(const Amplitudes& psi, const ModelParams& params, double t) {
    return params.statistics == Statistics::AllBosonic ? rhs_bosonic(psi, params, t)
                                                       : rhs_bose_fermi(psi, params, t);
}

// q_A counts A atoms (a, ab, t each hold one); q_B counts B atoms
// (b holds one; b2, t hold two; ab holds one). Both are constant under the
// gamma = 0 flow.
inline ConservedCharges conserved_charges(const Amplitudes& psi) {
    using namespace species;
    const auto n = detail::populations_of(psi);
    ConservedCharges q;
    q.q_a = n[a] + n[ab] + n[t];
    q.q_b = n[b] + 2.0 * n[b2] + n[ab] + 2.0 * n[t];
    return q;
}

inline ConservedCharges conserved_charges(const FieldState& state) {
    return conserved_charges(state.psi);
}

// Reactant state with A:B2 atom ratio R = f_a / (2 f_b2) and unit total
// charge f_a + 2 f_b2 = 1, plus vacuum-noise seeds on the product modes.
inline FieldState initial_state(double R, Complex seed_ab = {}, Complex seed_b = {}) {
    if (!(R > 0.0)) throw std::invalid_argument("initial_state: R must be > 0");
    const double f_b2 = 1.0 / (2.0 * (1.0 + R));
    const double f_a = R / (1.0 + R);
    FieldState s;
    s.psi[species::a] = std::sqrt(f_a);
    s.psi[species::b2] = std::sqrt(f_b2);
    s.psi[species::ab] = seed_ab;
    s.psi[species::b] = seed_b;
    s.t = 0.0;
    return s;
}

}  // namespace abreact
