#include "gravdec/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "gravdec/errors.hpp"

namespace gravdec::cumulant {

Correlation Correlation::heaviside(RealMatrix sigma, double tau_c) {
    Correlation c;
    c.kind = CorrelationKind::Heaviside;
    c.sigma = std::move(sigma);
    c.tau_c = tau_c;
    c.validate();
    return c;
}

Correlation Correlation::delta(RealMatrix sigma, double tau_c) {
    Correlation c;
    c.kind = CorrelationKind::Delta;
    c.sigma = std::move(sigma);
    c.tau_c = tau_c;
    c.validate();
    return c;
}

Correlation Correlation::exp_decay(RealMatrix sigma, double tau_c) {
    Correlation c;
    c.kind = CorrelationKind::ExpDecay;
    c.sigma = std::move(sigma);
    c.tau_c = tau_c;
    c.validate();
    return c;
}

Correlation Correlation::tabulated(RealMatrix sigma, std::vector<double> times,
                                   std::vector<double> values) {
    Correlation c;
    c.kind = CorrelationKind::Tabulated;
    c.sigma = std::move(sigma);
    c.times = std::move(times);
    c.values = std::move(values);
    if (!c.times.empty()) c.tau_c = c.times.back();
    c.validate();
    return c;
}

double Correlation::profile(double tau) const {
    if (tau < 0.0) tau = -tau;
    switch (kind) {
        case CorrelationKind::Heaviside:
            return tau <= tau_c ? 1.0 : 0.0;
        case CorrelationKind::Delta:
            return 0.0; // handled as a point evaluation, no pointwise density
        case CorrelationKind::ExpDecay:
            return std::exp(-tau / tau_c);
        case CorrelationKind::Tabulated: {
            if (times.empty() || tau > times.back()) return 0.0;
            auto it = std::upper_bound(times.begin(), times.end(), tau);
            if (it == times.begin()) return values.front();
            const std::size_t hi = static_cast<std::size_t>(it - times.begin());
            const std::size_t lo = hi - 1;
            if (hi == times.size()) return values.back();
            const double w = (tau - times[lo]) / (times[hi] - times[lo]);
            return values[lo] + w * (values[hi] - values[lo]);
        }
    }
    return 0.0;
}

double Correlation::profile_integral(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind) {
        case CorrelationKind::Heaviside:
            return std::min(t, tau_c);
        case CorrelationKind::Delta:
            return t >= tau_c ? tau_c : 0.0;
        case CorrelationKind::ExpDecay:
            return tau_c * (1.0 - std::exp(-t / tau_c));
        case CorrelationKind::Tabulated: {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < times.size(); ++i) {
                const double a = times[i], b = std::min(times[i + 1], t);
                if (b <= a) break;
                const double ga = profile(a), gb = profile(b);
                acc += 0.5 * (ga + gb) * (b - a);
                if (b >= t) break;
            }
            return acc;
        }
    }
    return 0.0;
}

double Correlation::support_end() const {
    switch (kind) {
        case CorrelationKind::Heaviside:
        case CorrelationKind::Delta:
            return tau_c;
        case CorrelationKind::ExpDecay:
            return 60.0 * tau_c; // exp tail below double precision
        case CorrelationKind::Tabulated:
            return times.empty() ? 0.0 : times.back();
    }
    return 0.0;
}

void Correlation::validate() const {
    std::vector<std::string> bad;
    if (kind != CorrelationKind::Tabulated && !(tau_c > 0.0)) bad.push_back("correlation.tau_c");
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0) bad.push_back("correlation.sigma");
    if ((sigma - sigma.transpose()).norm() > 1e-12 * std::max(1.0, sigma.norm()))
        bad.push_back("correlation.sigma (not symmetric)");
    else {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(sigma, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, sigma.norm()))
            bad.push_back("correlation.sigma (not positive semidefinite)");
    }
    if (kind == CorrelationKind::Tabulated) {
        if (times.size() != values.size() || times.size() < 2)
            bad.push_back("correlation.times/values");
        else {
            if (times.front() != 0.0) bad.push_back("correlation.times (must start at 0)");
            for (std::size_t i = 0; i + 1 < times.size(); ++i)
                if (!(times[i] < times[i + 1])) {
                    bad.push_back("correlation.times (not ascending)");
                    break;
                }
        }
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

Matrix StochasticCoupling::hamiltonian_coupling(const Matrix& Hc, double hbar) {
    const int n = static_cast<int>(Hc.rows());
    Matrix F = Matrix::Zero(n * n, n * n);
    const Complex c(0.0, -1.0 / hbar);
    // F vec(rho) = c (Hc rho - rho Hc)
    for (int j = 0; j < n; ++j) F.block(j * n, j * n, n, n) += c * Hc;
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) {
            const Complex v = -c * Hc(l, j);
            if (v == Complex(0.0, 0.0)) continue;
            for (int i = 0; i < n; ++i) F(j * n + i, l * n + i) += v;
        }
    return F;
}

void StochasticCoupling::validate() const {
    correlation.validate();
    if (static_cast<Eigen::Index>(ops.size()) != correlation.sigma.rows())
        throw ValidationError({"coupling.ops (count must match sigma dimension)"});
    // each F must annihilate the trace: sum over rows of each vec-column,
    // i.e. tr(F rho) = 0 for all rho  <=>  sum_i F[(i,i), b] = 0 for all b
    for (const Matrix& F : ops) {
        const auto dim2 = F.rows();
        const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim2))));
        if (static_cast<Eigen::Index>(n) * n != dim2 || F.cols() != dim2)
            throw ValidationError({"coupling.ops (not a square superoperator)"});
        double worst = 0.0;
        for (Eigen::Index b = 0; b < dim2; ++b) {
            Complex acc(0.0, 0.0);
            for (int i = 0; i < n; ++i) acc += F(i * n + i, b);
            worst = std::max(worst, std::abs(acc));
        }
        if (worst > 1e-10 * std::max(1.0, F.norm()))
            throw ValidationError({"coupling.ops (not trace-annihilating)"});
    }
}

namespace {

// adaptive Simpson on a matrix-valued integrand, Frobenius-norm error control
class MatrixSimpson {
public:
    MatrixSimpson(const std::function<Matrix(double)>& f, double tol) : f_(f), tol_(tol) {}

    Matrix integrate(double a, double b) {
        const Matrix fa = f_(a), fb = f_(b), fm = f_(0.5 * (a + b));
        Matrix whole = simpson(fa, fm, fb, b - a);
        return recurse(a, b, fa, fm, fb, whole, 0);
    }

private:
    static Matrix simpson(const Matrix& fa, const Matrix& fm, const Matrix& fb, double h) {
        return (h / 6.0) * (fa + 4.0 * fm + fb);
    }

    Matrix recurse(double a, double b, const Matrix& fa, const Matrix& fm, const Matrix& fb,
                   const Matrix& whole, int depth) {
        const double m = 0.5 * (a + b);
        const Matrix fl = f_(0.5 * (a + m));
        const Matrix fr = f_(0.5 * (m + b));
        const Matrix left = simpson(fa, fl, fm, m - a);
        const Matrix right = simpson(fm, fr, fb, b - m);
        const Matrix sum = left + right;
        const double err = (sum - whole).norm() / 15.0;
        const double scale = std::max(sum.norm(), 1e-300);
        if (err <= tol_ * scale || depth >= 28) {
            if (depth >= 28 && err > 10.0 * tol_ * scale)
                throw NumericalError("cumulant quadrature did not converge", err / scale);
            return sum + (sum - whole) / 15.0;
        }
        return recurse(a, m, fa, fl, fm, left, depth + 1) +
               recurse(m, b, fm, fr, fb, right, depth + 1);
    }

    const std::function<Matrix(double)>& f_;
    double tol_;
};

double spectral_radius_estimate(const Matrix& A) {
    // power iteration on a fixed deterministic start vector
    Vector v = Vector::Ones(A.rows());
    v.normalize();
    double r = 0.0;
    for (int it = 0; it < 30; ++it) {
        v = A * v;
        r = v.norm();
        if (r == 0.0) return 0.0;
        v /= r;
    }
    return r;
}

} // namespace

Matrix second_order_generator(const Matrix& A, const StochasticCoupling& coupling, double t,
                              double alpha, double rel_tol) {
    coupling.validate();
    if (A.rows() > 64 * 64)
        throw CapacityError("second_order_generator: superoperator exponentials limited to "
                            "Hilbert dimension 64");
    if (t < 0.0) throw std::domain_error("second_order_generator: t >= 0");

    Matrix G = A;
    if (alpha == 0.0 || t == 0.0) return G;

    const Correlation& corr = coupling.correlation;
    const double a2 = alpha * alpha;

    if (corr.kind == CorrelationKind::Delta) {
        if (t < corr.tau_c) return G;
        const Matrix E = (corr.tau_c * A).exp();
        const Matrix Einv = (-corr.tau_c * A).exp();
        for (Eigen::Index i = 0; i < corr.sigma.rows(); ++i)
            for (Eigen::Index j = 0; j < corr.sigma.cols(); ++j) {
                if (corr.sigma(i, j) == 0.0) continue;
                G += a2 * corr.tau_c * corr.sigma(i, j) *
                     (coupling.ops[i] * E * coupling.ops[j] * Einv);
            }
        return G;
    }

    const double upper = std::min(t, corr.support_end());
    if (upper <= 0.0) return G;

    std::function<Matrix(double)> integrand = [&](double tau) -> Matrix {
        const Matrix E = (tau * A).exp();
        const Matrix Einv = (-tau * A).exp();
        Matrix term = Matrix::Zero(A.rows(), A.cols());
        const double g = corr.profile(tau);
        if (g == 0.0) return term;
        for (Eigen::Index i = 0; i < corr.sigma.rows(); ++i)
            for (Eigen::Index j = 0; j < corr.sigma.cols(); ++j) {
                if (corr.sigma(i, j) == 0.0) continue;
                term += (g * corr.sigma(i, j)) * (coupling.ops[i] * E * coupling.ops[j] * Einv);
            }
        return term;
    };

    // split at profile knots (kinks break Simpson's error model)
    std::vector<double> cuts{0.0};
    if (corr.kind == CorrelationKind::Tabulated) {
        for (double knot : corr.times)
            if (knot > 0.0 && knot < upper) cuts.push_back(knot);
    }
    cuts.push_back(upper);

    MatrixSimpson quad(integrand, rel_tol);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
        G += a2 * quad.integrate(cuts[s], cuts[s + 1]);
    return G;
}

Matrix commuting_generator(const Matrix& A, const StochasticCoupling& coupling, double t,
                           double alpha) {
    coupling.validate();
    const double normA = A.norm();
    for (const Matrix& F : coupling.ops) {
        const double comm = (A * F - F * A).norm();
        if (comm > 1e-12 * normA * F.norm())
            throw RegimeError("commuting_generator: [A, F] is not negligible (" +
                              std::to_string(comm) + ")");
    }
    const double lambda = coupling.correlation.profile_integral(t);
    Matrix G = A;
    const double a2 = alpha * alpha;
    for (Eigen::Index i = 0; i < coupling.correlation.sigma.rows(); ++i)
        for (Eigen::Index j = 0; j < coupling.correlation.sigma.cols(); ++j) {
            if (coupling.correlation.sigma(i, j) == 0.0) continue;
            G += (a2 * lambda * coupling.correlation.sigma(i, j)) *
                 (coupling.ops[i] * coupling.ops[j]);
        }
    return G;
}

Matrix markovian_generator(const Matrix& A, const StochasticCoupling& coupling, double alpha,
                           double* regime_ratio) {
    coupling.validate();
    const double tau_c = coupling.correlation.kind == CorrelationKind::Tabulated
                             ? coupling.correlation.profile_integral(
                                   coupling.correlation.support_end())
                             : coupling.correlation.tau_c;
    if (regime_ratio) {
        // tau_c / tau_free with tau_free ~ 1/spectral-radius(A)
        *regime_ratio = tau_c * spectral_radius_estimate(A);
    }
    Matrix G = A;
    const double a2 = alpha * alpha;
    for (Eigen::Index i = 0; i < coupling.correlation.sigma.rows(); ++i)
        for (Eigen::Index j = 0; j < coupling.correlation.sigma.cols(); ++j) {
            if (coupling.correlation.sigma(i, j) == 0.0) continue;
            G += (a2 * tau_c * coupling.correlation.sigma(i, j)) *
                 (coupling.ops[i] * coupling.ops[j]);
        }
    return G;
}

} // namespace gravdec::cumulant
