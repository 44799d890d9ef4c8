// cumulant.hpp — second-order cumulant generators for multiplicative
// stochastic Liouville equations d Omega/dt = (A + alpha B(t)) Omega with
// B(t) = h_i(t) F^i, E[h_i(t) h_j(s)] = D_ij(t - s) = sigma_ij g(|t - s|).
//
// The time-local generator at second order in alpha is
//   G(t) = A + alpha^2 sum_ij sigma_ij \int_0^t dtau g(tau) F^i e^{A tau} F^j e^{-A tau},
// exact when [A, F^i] = 0, with remainder O(alpha^4 tau_c^3 t) otherwise.

#pragma once

#include <vector>

#include "gravdec/model.hpp"

namespace gravdec::cumulant {

enum class CorrelationKind {
    Heaviside, // g = 1 for tau <= tau_c, else 0 (sharp-cutoff approximation)
    Delta,     // g = tau_c delta(tau - tau_c): Markovian point evaluation
    ExpDecay,  // g = e^{-tau/tau_c} (experimental smooth-tail option)
    Tabulated, // piecewise-linear g from samples
};

struct Correlation {
    CorrelationKind kind = CorrelationKind::Heaviside;
    RealMatrix sigma; // sigma_ij, symmetric positive semidefinite
    double tau_c = 1.0;
    std::vector<double> times;  // Tabulated knots (ascending, from 0)
    std::vector<double> values; // g at the knots; zero beyond the last knot

    static Correlation heaviside(RealMatrix sigma, double tau_c);
    static Correlation delta(RealMatrix sigma, double tau_c);
    static Correlation exp_decay(RealMatrix sigma, double tau_c);
    static Correlation tabulated(RealMatrix sigma, std::vector<double> times,
                                 std::vector<double> values);

    double profile(double tau) const;          // g(tau)
    double profile_integral(double t) const;   // \int_0^t g (the lambda factor)
    double support_end() const;                // g vanishes beyond this point
    void validate() const;
};

struct StochasticCoupling {
    std::vector<Matrix> ops; // superoperators F^i on vec(rho), dim^2 x dim^2
    Correlation correlation;

    // F = -(i/hbar)(H_L - H_R), the commutator superoperator of a coupling
    // Hamiltonian.
    static Matrix hamiltonian_coupling(const Matrix& Hc, double hbar = 1.0);

    void validate() const; // sigma shape/PSD, trace annihilation of each F
};

// Time-local second-order generator; interior exponentials by
// scaling-and-squaring, the tau integral by adaptive quadrature.
Matrix second_order_generator(const Matrix& A, const StochasticCoupling& coupling, double t,
                              double alpha, double rel_tol = 1e-9);

// Commuting closed form G = A + alpha^2 lambda sigma_ij F^i F^j with
// lambda = \int_0^t g (= min(t, tau_c) for the Heaviside profile).
// Verifies ||[A, F^i]|| < 1e-12 ||A|| ||F^i|| and throws RegimeError otherwise.
Matrix commuting_generator(const Matrix& A, const StochasticCoupling& coupling, double t,
                           double alpha);

// Markovian limit G = A + alpha^2 tau_c sigma_ij F^i F^j.  Reports (does not
// enforce) the regime ratio tau_c / tau_free via the spectral radius of A.
Matrix markovian_generator(const Matrix& A, const StochasticCoupling& coupling, double alpha,
                           double* regime_ratio = nullptr);

} // namespace gravdec::cumulant
