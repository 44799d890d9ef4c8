// kernels.hpp — spatial correlation kernels, mass form factors, and the
// position-decoherence rate functional Gamma(dx)
//
// Conventions pinned here and used everywhere else:
//   * spectral kernel  u~(q) = (2 pi)^{-3/2} \int d^3x u(x) e^{-i q.x/hbar},
//     so the Gaussian kernel u = exp(-dx^2/2L^2) has u~(q) = L^3 exp(-q^2 L^2 / 2 hbar^2)
//     and the delta kernel u = l^3 delta^3(dx) has the flat u~ = l^3 (2 pi)^{-3/2};
//   * form factor m~(q) normalized to the total mass at q = 0
//     (point: m~ = M;  Gaussian radius R: m~ = M exp(-q^2 R^2 / 2 hbar^2));
//   * Gamma(dx) = (2 alpha^2 tau_c c^4 / ((2 pi)^{3/2} hbar^5)) w00
//                 \int d^3q u~(q) m~^2(q) (1 - cos(q.dx/hbar)).
// With these choices the closed forms below are exact consequences, which is
// the end-to-end consistency anchor of the whole rate module.

#pragma once

#include "gravdec/model.hpp"
#include "gravdec/units.hpp"

namespace gravdec::kernels {

class CorrelationKernel {
public:
    static CorrelationKernel gaussian(double L);
    static CorrelationKernel delta(double l);

    KernelKind kind() const { return kind_; }
    double length() const { return len_; } // L or l

    // real-space kernel u(dx); throws RegimeError for the distributional kernel
    double real_space(double dx) const;
    // spectral kernel u~(q)
    double spectral(double q, double hbar = 1.0) const;

private:
    CorrelationKernel(KernelKind k, double len) : kind_(k), len_(len) {}
    KernelKind kind_;
    double len_;
};

class FormFactor {
public:
    explicit FormFactor(MassSpec spec);

    // m~(q), normalized so m~(0) = M
    double operator()(double q, double hbar = 1.0) const;
    const MassSpec& mass() const { return spec_; }

private:
    MassSpec spec_;
};

// ---- position-basis decoherence rate -------------------------------------

// Gamma(dx) by adaptive radial quadrature with the analytic angular reduction
//   \int dOmega (1 - cos(q.dx/hbar)) = 4 pi (1 - sinc(q dx / hbar)).
// Gaussian kernels only; the distributional kernel routes to closed forms.
double position_rate_spectral(const NoiseSpec& noise, const FormFactor& ff, double dx,
                              const Scales& scales = Scales::natural(),
                              double rel_tol = 1e-12);

// Closed form for any Gaussian-kernel / Gaussian-or-point-mass combination:
//   Gamma(dx) = (2 alpha^2 tau_c c^4 / hbar^2) w00 M^2 (L^3/s^3) (1 - e^{-dx^2/2s^2}),
//   s^2 = L^2 + 2 R^2.
double position_rate_gaussian_closed(const NoiseSpec& noise, const FormFactor& ff, double dx,
                                     const Scales& scales = Scales::natural());

// Point mass in a Gaussian-correlated field (tau_c = L/c):
//   Gamma(dx) = (2 alpha^2 m^2 c^3 L / hbar^2) (1 - e^{-dx^2/2L^2}).
struct SGParams {
    double alpha;
    double m;
    double L;
};
double sanchez_gomez_rate(const SGParams& p, double dx,
                          const Scales& scales = Scales::natural());

// Gaussian mass in a spatially delta-correlated field:
//   Gamma(dx) = (alpha^2 M^2 tau_c c^4 l^3 / (4 pi^{3/2} hbar^2 R^3)) (1 - e^{-dx^2/4R^2}).
struct BlencoweParams {
    double alpha;
    double M;
    double R;
    double l;
    double tau_c;
};
double blencowe_rate(const BlencoweParams& p, double dx,
                     const Scales& scales = Scales::natural());

// Same rate by real-space overlap quadrature,
//   Gamma(dx) = (alpha^2 tau_c c^4 l^3 / hbar^2) \int d^3r (m(r) - m(r - dx))^2,
// evaluated with nested adaptive quadrature.  Independent route used to
// cross-check blencowe_rate.
double blencowe_overlap_rate(const BlencoweParams& p, double dx,
                             const Scales& scales = Scales::natural(),
                             double rel_tol = 1e-10);

// ---- momentum/energy-basis coefficients -----------------------------------

// C^{mu nu} = (alpha^2 lambda / ((2 pi)^{3/2} hbar^5)) \int d^3q u~^{mu nu}(q) m~^2(q) / M^2
struct MomentumCoefficients {
    double C00 = 0.0; // multiplies (E - E')^2
    double C0i = 0.0; // multiplies c^2 (p - p')^2
    double Cij = 0.0; // multiplies (p^2 - p'^2)^2 / 4M^2
};

MomentumCoefficients momentum_coefficients(const NoiseSpec& noise, const FormFactor& ff,
                                           double lambda,
                                           const Scales& scales = Scales::natural(),
                                           double rel_tol = 1e-12);

// Closed form of the same integrals for Gaussian families: C = alpha^2 lambda w L^3/(hbar^2 s^3).
MomentumCoefficients momentum_coefficients_closed(const NoiseSpec& noise, const FormFactor& ff,
                                                  double lambda,
                                                  const Scales& scales = Scales::natural());

// ---- axis marginal for grid generators ------------------------------------

// W(q_z) = \int d^2q_perp u~(|q|) m~^2(|q|) / M^2 = amplitude * e^{-q_z^2 s^2 / 2 hbar^2}.
// This is the exact 1-D spectral weight of the 3-D q-integrals when the
// position operator lives on one axis.
struct AxisMarginal {
    double amplitude = 0.0;
    double s = 0.0; // Gaussian width parameter in the exponent
};

AxisMarginal axis_marginal(const NoiseSpec& noise, const FormFactor& ff,
                           const Scales& scales = Scales::natural());

} // namespace gravdec::kernels
