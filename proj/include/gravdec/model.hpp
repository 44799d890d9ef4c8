// model.hpp — physical parameter containers, grids, and state representations

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gravdec/errors.hpp"
#include "gravdec/units.hpp"

namespace gravdec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Invariant tolerances shared by the whole artifact.
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kHermTol = 1e-10;
inline constexpr double kPositivityTol = -1e-8; // min eigenvalue floor, Lindblad-form only

enum class KernelKind { GaussianL, DeltaL3 };
enum class DensityKind { Point, GaussianR };

// Relative magnitudes of the metric-fluctuation blocks (00, 0i, ij).
struct ComponentWeights {
    double w00 = 1.0;
    double w0i = 0.0;
    double wij = 0.0;

    // h00 at least as strong as the other blocks (position-basis regime).
    bool position_dominant() const { return w00 >= w0i && w00 >= wij; }
    // hij dominates (energy-basis regime).
    bool tensor_dominant() const { return wij > w00 && wij > w0i; }
};

struct NoiseSpec {
    double alpha = 0.0;   // dimensionless fluctuation strength
    double tau_c = 1.0;   // correlation time
    KernelKind kernel = KernelKind::GaussianL;
    double L = 1.0;       // Gaussian correlation length
    double l = 1.0;       // delta-kernel correlation volume^(1/3)
    ComponentWeights weights;

    void validate() const; // throws ValidationError naming each bad field
};

struct MassSpec {
    double M = 1.0;
    DensityKind density = DensityKind::Point;
    double R = 0.0; // Gaussian density radius

    void validate() const;
};

// Effective correlation-time factor entering every dissipation rate.
double lambda_eff(double tau_c, double t);

// Periodic 1-D position grid, FFT-compatible (n a power of two).
// Momentum nodes follow FFT ordering: p_k = 2*pi*hbar*k~/extent with
// k~ = k for k < n/2 and k - n for k >= n/2, spanning [-pi hbar/dx, pi hbar/dx).
struct Grid1D {
    int n = 0;
    double extent = 0.0;

    double dx() const { return extent / n; }
    double x(int i) const { return -0.5 * extent + i * dx(); }
    double p(int k, double hbar = 1.0) const {
        const int kk = (k < n / 2) ? k : k - n;
        return 2.0 * M_PI * hbar * kk / extent;
    }
    double p_max(double hbar = 1.0) const { return M_PI * hbar / dx(); }
    double kinetic_energy_max(double mass, double hbar = 1.0) const {
        const double pm = p_max(hbar);
        return pm * pm / (2.0 * mass);
    }

    static bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }
    void validate() const;
};

enum class BasisTag { Position, Momentum, Abstract };

class PureState;

// N x N density matrix; single-owner mutable buffer, movable across threads.
class DenseState {
public:
    DenseState() = default;
    DenseState(Matrix rho, BasisTag basis, Grid1D grid = {});
    static DenseState from_pure(const PureState& psi);

    int dim() const { return static_cast<int>(rho_.rows()); }
    Matrix& matrix() { return rho_; }
    const Matrix& matrix() const { return rho_; }
    BasisTag basis() const { return basis_; }
    const Grid1D& grid() const { return grid_; }

    Complex trace() const { return rho_.trace(); }
    double trace_error() const { return std::abs(rho_.trace() - Complex(1.0, 0.0)); }
    // ||rho - rho^dagger||_F / ||rho||_F
    double hermiticity_error() const;
    // smallest eigenvalue of the hermitian part
    double min_eigenvalue() const;
    double purity() const { return (rho_ * rho_).trace().real(); }

    void normalize(); // rescale to unit trace
    // throws RegimeError when hermiticity/trace (and optionally positivity) fail
    void check_invariants(bool require_positive = false) const;

private:
    Matrix rho_;
    BasisTag basis_ = BasisTag::Abstract;
    Grid1D grid_{};
};

class PureState {
public:
    PureState() = default;
    PureState(Vector psi, BasisTag basis, Grid1D grid = {});

    int dim() const { return static_cast<int>(psi_.size()); }
    Vector& vector() { return psi_; }
    const Vector& vector() const { return psi_; }
    BasisTag basis() const { return basis_; }
    const Grid1D& grid() const { return grid_; }

    double norm() const { return psi_.norm(); }
    double norm_error() const { return std::abs(psi_.norm() - 1.0); }
    void normalize() { psi_ /= psi_.norm(); }

private:
    Vector psi_;
    BasisTag basis_ = BasisTag::Abstract;
    Grid1D grid_{};
};

// Probability mass in the outer band of the grid (boundary-leak monitor).
// Wavepackets are expected to keep >= 4 sigma away from the domain edge;
// callers warn when this exceeds 1e-6.
double boundary_mass(const DenseState& state, int band_cells = 2);

} // namespace gravdec
