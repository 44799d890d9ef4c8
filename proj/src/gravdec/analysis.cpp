#include "gravdec/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "gravdec/cumulant.hpp"
#include "gravdec/errors.hpp"
#include "gravdec/fft.hpp"

namespace gravdec::analysis {

void DecaySeries::validate() const {
    std::vector<std::string> bad;
    if (times.size() != coherence.size()) bad.push_back("series.times/coherence size");
    if (!std_err.empty() && std_err.size() != times.size()) bad.push_back("series.std_err size");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1])) {
            bad.push_back("series.times (not strictly increasing)");
            break;
        }
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

Complex lag_coherence(const Matrix& rho, int lag) {
    const int n = static_cast<int>(rho.rows());
    Complex acc(0.0, 0.0);
    for (int i = 0; i + lag < n; ++i) acc += rho(i, i + lag);
    return acc;
}

bool coherence_bound_ok(const Matrix& rho, double tol) {
    const int n = static_cast<int>(rho.rows());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double bound =
                std::sqrt(std::max(0.0, rho(i, i).real() * rho(j, j).real()));
            if (std::abs(rho(i, j)) > bound + tol) return false;
        }
    return true;
}

RateFit fit_exponential_rate(const DecaySeries& series) {
    series.validate();
    const std::size_t n = series.times.size();
    if (n < 10) throw ValidationError({"series: needs >= 10 points"});
    for (const Complex& c : series.coherence)
        if (!(std::abs(c) > 1e-12))
            throw ValidationError({"series: |coherence| must exceed 1e-12 in the fit window"});

    // weighted least squares on y = log|C| against y = a - r t
    double sw = 0.0, swt = 0.0, swtt = 0.0, swy = 0.0, swty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::abs(series.coherence[i]);
        const double y = std::log(mag);
        double w = 1.0;
        if (!series.std_err.empty() && series.std_err[i] > 0.0) {
            const double sy = series.std_err[i] / mag; // var(log|C|) = var(C)/|C|^2
            w = 1.0 / (sy * sy);
        }
        const double t = series.times[i];
        sw += w;
        swt += w * t;
        swtt += w * t * t;
        swy += w * y;
        swty += w * t * y;
    }
    const double det = sw * swtt - swt * swt;
    if (det <= 0.0) throw NumericalError("fit_exponential_rate: degenerate design", det);
    const double slope = (sw * swty - swt * swy) / det;
    const double intercept = (swtt * swy - swt * swty) / det;

    // chi^2 scaling keeps the error honest when the weights are off (or absent)
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::abs(series.coherence[i]);
        const double y = std::log(mag);
        double w = 1.0;
        if (!series.std_err.empty() && series.std_err[i] > 0.0) {
            const double sy = series.std_err[i] / mag;
            w = 1.0 / (sy * sy);
        }
        const double r = y - (intercept + slope * series.times[i]);
        chi2 += w * r * r;
    }
    const double dof = static_cast<double>(n) - 2.0;
    double var_slope = sw / det;
    if (series.std_err.empty()) {
        var_slope *= chi2 / dof;
    } else {
        var_slope *= std::max(1.0, chi2 / dof);
    }

    RateFit fit;
    fit.rate = -slope;
    fit.std_err = std::sqrt(std::max(var_slope, 0.0));
    fit.points = static_cast<int>(n);
    return fit;
}

DecaySeries series_from_ensemble(const oracle::EnsembleResult& ens, int lag) {
    DecaySeries s;
    s.times = ens.times;
    s.coherence.reserve(ens.mean.size());
    s.std_err.reserve(ens.mean.size());
    const int n = static_cast<int>(ens.mean.front().rows());
    for (std::size_t k = 0; k < ens.mean.size(); ++k) {
        s.coherence.push_back(lag_coherence(ens.mean[k], lag));
        double var = 0.0;
        for (int i = 0; i + lag < n; ++i) {
            const double se = ens.std_err[k](i, i + lag);
            var += se * se;
        }
        s.std_err.push_back(std::sqrt(var));
    }
    return s;
}

DecaySeries series_from_snapshots(const std::vector<double>& times,
                                  const std::vector<DenseState>& snaps, int lag) {
    DecaySeries s;
    s.times = times;
    for (const DenseState& st : snaps) s.coherence.push_back(lag_coherence(st.matrix(), lag));
    return s;
}

namespace {

// momentum-diagonal generators act in the momentum basis; rotate the action
// back so every comparison happens on position-basis matrices
Matrix momentum_action_in_position_basis(const generators::Superoperator& gen,
                                         const DenseState& state) {
    Matrix rho_m = state.matrix();
    fft::to_momentum(rho_m);
    DenseState tmp(std::move(rho_m), BasisTag::Momentum, state.grid());
    Matrix act = gen.apply(tmp);
    fft::to_position(act);
    return act;
}

} // namespace

LimitReport limit_report(const generators::Superoperator& full,
                         const generators::Superoperator& position,
                         const generators::Superoperator& momentum,
                         const std::vector<std::pair<std::string, DenseState>>& probes,
                         const NoiseSpec& noise, const MassSpec& mass, const Scales& scales) {
    LimitReport report;
    const kernels::FormFactor ff(mass);
    const kernels::AxisMarginal marginal = kernels::axis_marginal(noise, ff, scales);
    const double q_rms = scales.hbar / marginal.s;

    for (const auto& [label, state] : probes) {
        LimitRow row;
        row.state_label = label;

        const Matrix a_full = full.apply(state);
        const Matrix a_pos = position.apply(state);
        const Matrix a_mom = momentum_action_in_position_basis(momentum, state);
        const double scale = std::max(a_full.norm(), 1e-300);
        row.dev_position = (a_full - a_pos).norm() / scale;
        row.dev_momentum = (a_full - a_mom).norm() / scale;

        // pair-separation spread weighted by |rho(x,x')|^2
        const Grid1D& g = state.grid();
        double wsum = 0.0, dx2 = 0.0;
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                const double w = std::norm(state.matrix()(i, j));
                const double d = g.x(i) - g.x(j);
                wsum += w;
                dx2 += w * d * d;
            }
        const double dx_rms = std::sqrt(dx2 / std::max(wsum, 1e-300));
        row.q_dx_spread = q_rms * dx_rms / scales.hbar;

        // energy spread from the momentum populations
        Matrix rho_m = state.matrix();
        fft::to_momentum(rho_m);
        double esum = 0.0, e2sum = 0.0, psum = 0.0;
        for (int k = 0; k < g.n; ++k) {
            const double pop = std::max(0.0, rho_m(k, k).real());
            const double p = g.p(k, scales.hbar);
            const double e = p * p / (2.0 * mass.M);
            psum += pop;
            esum += pop * e;
            e2sum += pop * e * e;
        }
        const double emean = esum / std::max(psum, 1e-300);
        const double evar = std::max(0.0, e2sum / std::max(psum, 1e-300) - emean * emean);
        row.dE_over_Mc2 = std::sqrt(evar) / (mass.M * scales.c * scales.c);

        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---- two-level scaling study -----------------------------------------------

namespace {

Matrix sigma_x() {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

Matrix sigma_z() {
    Matrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

struct TwoLevelSetup {
    Matrix H0;
    Matrix Hc;
    Matrix A; // free Liouvillian superoperator
    cumulant::StochasticCoupling coupling;
};

TwoLevelSetup make_setup(const TwoLevelConfig& cfg) {
    TwoLevelSetup s;
    s.H0 = 0.5 * cfg.hbar * cfg.omega * sigma_z();
    s.Hc = cfg.coupling_sigma_x ? sigma_x() : sigma_z();
    s.A = cumulant::StochasticCoupling::hamiltonian_coupling(s.H0, cfg.hbar);
    s.coupling.ops = {cumulant::StochasticCoupling::hamiltonian_coupling(s.Hc, cfg.hbar)};
    RealMatrix sig(1, 1);
    sig(0, 0) = cfg.sigma;
    // block-constant noise with a random grid offset has exactly this
    // triangular autocorrelation
    s.coupling.correlation =
        cumulant::Correlation::tabulated(sig, {0.0, cfg.tau_c}, {1.0, 0.0});
    return s;
}

} // namespace

std::vector<double> two_level_snapshot_times(const TwoLevelConfig& cfg) {
    std::vector<double> times;
    for (int k = 1; k <= cfg.snapshots; ++k)
        times.push_back(cfg.t_final * k / cfg.snapshots);
    return times;
}

std::vector<Matrix> two_level_cumulant_evolution(const TwoLevelConfig& cfg, double alpha,
                                                 const std::vector<double>& times) {
    const TwoLevelSetup setup = make_setup(cfg);

    // initial state |+> (sensitive to both dephasing and relaxation)
    Vector psi(2);
    psi << M_SQRT1_2, M_SQRT1_2;
    Matrix rho = psi * psi.adjoint();
    Vector y = Eigen::Map<const Vector>(rho.data(), 4);

    auto gen_at = [&](double t) {
        return cumulant::second_order_generator(setup.A, setup.coupling, t, alpha, 1e-10);
    };

    std::vector<Matrix> out;
    double t = 0.0;
    const double support = cfg.tau_c;
    Matrix g_const; // generator is constant once t exceeds the correlation support
    bool have_const = false;

    for (double t_snap : times) {
        while (t < t_snap - 1e-15) {
            if (t >= support && have_const) {
                // constant-generator stretch: one exact exponential jump
                const double h = t_snap - t;
                y = ((h * g_const).exp() * y).eval();
                t = t_snap;
                break;
            }
            // time-dependent stretch: fixed-step RK4 up to min(support, t_snap)
            const double t_end = std::min(t_snap, std::max(support, t));
            const int n_steps = std::max(
                1, static_cast<int>(std::ceil((t_end - t) / (cfg.tau_c / 200.0))));
            const double h = (t_end - t) / n_steps;
            for (int s = 0; s < n_steps; ++s) {
                const Matrix g1 = gen_at(t);
                const Matrix g2 = gen_at(t + 0.5 * h);
                const Matrix g3 = gen_at(t + h);
                const Vector k1 = g1 * y;
                const Vector k2 = g2 * (y + 0.5 * h * k1);
                const Vector k3 = g2 * (y + 0.5 * h * k2);
                const Vector k4 = g3 * (y + h * k3);
                y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
            }
            if (t >= support && !have_const) {
                g_const = gen_at(support + 1.0); // frozen beyond the support
                have_const = true;
            }
        }
        out.push_back(Eigen::Map<const Matrix>(y.data(), 2, 2));
    }
    return out;
}

ScalingStudy alpha_scaling_study(const TwoLevelConfig& cfg, const std::vector<double>& alphas) {
    if (alphas.size() < 3)
        throw ValidationError({"scaling.alphas (needs >= 3 points)"});

    const TwoLevelSetup setup = make_setup(cfg);
    const std::vector<double> times = two_level_snapshot_times(cfg);
    const double alpha_max = *std::max_element(alphas.begin(), alphas.end());

    oracle::DenseNoiseModel model;
    model.H0 = setup.H0;
    model.couplings = {setup.Hc};
    model.sigma = RealVector::Constant(1, cfg.sigma);
    model.block_length = cfg.tau_c;
    model.hbar = cfg.hbar;

    Vector psi0(2);
    psi0 << M_SQRT1_2, M_SQRT1_2;

    ScalingStudy study;
    for (double alpha : alphas) {
        // statistical error of antithetic pair means scales as alpha^2, the
        // systematic target as alpha^4: grow the ensemble as (alpha_max/alpha)^4
        const double scale = std::pow(alpha_max / alpha, 4.0);
        long n = static_cast<long>(std::ceil(cfg.n_traj_base * scale / 2.0)) * 2;
        n = std::min<long>(n, 100'000'000);

        const auto mc = oracle::run_dense_ensemble(model, alpha, times, psi0,
                                                   static_cast<int>(n), cfg.seed, cfg.threads,
                                                   /*antithetic=*/true);
        const auto cumulant_rho = two_level_cumulant_evolution(cfg, alpha, times);

        ScalingPoint point;
        point.alpha = alpha;
        point.n_traj = static_cast<int>(n);
        for (std::size_t s = 0; s < times.size(); ++s) {
            const double dev = (mc.mean[s] - cumulant_rho[s]).norm();
            if (dev >= point.deviation) {
                point.deviation = dev;
                point.stat_err = mc.std_err[s].norm();
            }
        }
        study.points.push_back(point);
    }

    // power-law fit log(dev) = log(k) + p log(alpha)
    const std::size_t n = study.points.size();
    double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    for (const auto& p : study.points) {
        const double x = std::log(p.alpha);
        const double y = std::log(std::max(p.deviation, 1e-300));
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    study.exponent = (n * sxy - sx * sy) / det;
    const double intercept = (sxx * sy - sx * sxy) / det;
    double ssr = 0.0;
    for (const auto& p : study.points) {
        const double r =
            std::log(std::max(p.deviation, 1e-300)) - (intercept + study.exponent * std::log(p.alpha));
        ssr += r * r;
    }
    if (n > 2) study.exponent_std_err = std::sqrt(ssr / (n - 2) * n / det);

    study.conclusive = true;
    study.n_traj_required = 0;
    for (const auto& p : study.points) {
        if (!(p.stat_err < 0.1 * p.deviation)) study.conclusive = false;
        if (p.deviation > 0.0) {
            const double factor = 10.0 * p.stat_err / std::max(p.deviation, 1e-300);
            const long req = static_cast<long>(std::ceil(p.n_traj * factor * factor));
            study.n_traj_required = std::max(study.n_traj_required, req);
        }
    }
    return study;
}

} // namespace gravdec::analysis
