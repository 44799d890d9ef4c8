#include "gravdec/model.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace gravdec {

void NoiseSpec::validate() const {
    std::vector<std::string> bad;
    if (!(alpha >= 0.0)) bad.push_back("noise.alpha");
    if (!(tau_c > 0.0)) bad.push_back("noise.tau_c");
    if (kernel == KernelKind::GaussianL && !(L > 0.0)) bad.push_back("noise.L");
    if (kernel == KernelKind::DeltaL3 && !(l > 0.0)) bad.push_back("noise.l");
    if (!(weights.w00 >= 0.0)) bad.push_back("noise.weights.h00");
    if (!(weights.w0i >= 0.0)) bad.push_back("noise.weights.h0i");
    if (!(weights.wij >= 0.0)) bad.push_back("noise.weights.hij");
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

void MassSpec::validate() const {
    std::vector<std::string> bad;
    if (!(M > 0.0)) bad.push_back("mass.M");
    if (density == DensityKind::GaussianR && !(R > 0.0)) bad.push_back("mass.R");
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

void Grid1D::validate() const {
    std::vector<std::string> bad;
    if (n < 8 || !is_power_of_two(n)) bad.push_back("grid.n");
    if (!(extent > 0.0)) bad.push_back("grid.extent");
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

double lambda_eff(double tau_c, double t) {
    if (!(tau_c > 0.0) || t < 0.0)
        throw std::domain_error("lambda_eff: requires tau_c > 0 and t >= 0");
    return std::min(tau_c, t);
}

DenseState::DenseState(Matrix rho, BasisTag basis, Grid1D grid)
    : rho_(std::move(rho)), basis_(basis), grid_(grid) {
    if (rho_.rows() != rho_.cols())
        throw std::invalid_argument("DenseState: matrix must be square");
}

DenseState DenseState::from_pure(const PureState& psi) {
    Matrix rho = psi.vector() * psi.vector().adjoint();
    return DenseState(std::move(rho), psi.basis(), psi.grid());
}

double DenseState::hermiticity_error() const {
    const double scale = rho_.norm();
    if (scale == 0.0) return 0.0;
    return (rho_ - rho_.adjoint()).norm() / scale;
}

double DenseState::min_eigenvalue() const {
    Matrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DenseState::normalize() {
    const Complex tr = rho_.trace();
    if (std::abs(tr) == 0.0)
        throw RegimeError("DenseState: cannot normalize a traceless matrix");
    rho_ /= tr;
}

void DenseState::check_invariants(bool require_positive) const {
    if (hermiticity_error() > kHermTol)
        throw RegimeError("DenseState: hermiticity violated (" +
                          std::to_string(hermiticity_error()) + ")");
    if (trace_error() > kTraceTol)
        throw RegimeError("DenseState: trace violated (" + std::to_string(trace_error()) + ")");
    if (require_positive && min_eigenvalue() < kPositivityTol)
        throw RegimeError("DenseState: positivity violated (min eigenvalue " +
                          std::to_string(min_eigenvalue()) + ")");
}

PureState::PureState(Vector psi, BasisTag basis, Grid1D grid)
    : psi_(std::move(psi)), basis_(basis), grid_(grid) {}

double boundary_mass(const DenseState& state, int band_cells) {
    const int n = state.dim();
    double mass = 0.0;
    for (int i = 0; i < band_cells && i < n; ++i) {
        mass += state.matrix()(i, i).real();
        mass += state.matrix()(n - 1 - i, n - 1 - i).real();
    }
    return mass;
}

} // namespace gravdec
