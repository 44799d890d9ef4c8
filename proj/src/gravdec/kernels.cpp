#include "gravdec/kernels.hpp"

#include <cmath>

#include "gravdec/errors.hpp"
#include "gravdec/quadrature.hpp"

namespace gravdec::kernels {

namespace {

constexpr double kTwoPiPow32 = 15.749609945722419; // (2 pi)^{3/2}

double sinc(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

} // namespace

CorrelationKernel CorrelationKernel::gaussian(double L) {
    if (!(L > 0.0)) throw ValidationError({"noise.L"});
    return CorrelationKernel(KernelKind::GaussianL, L);
}

CorrelationKernel CorrelationKernel::delta(double l) {
    if (!(l > 0.0)) throw ValidationError({"noise.l"});
    return CorrelationKernel(KernelKind::DeltaL3, l);
}

double CorrelationKernel::real_space(double dx) const {
    if (kind_ == KernelKind::DeltaL3)
        throw RegimeError("CorrelationKernel: distributional kernel has no pointwise value");
    return std::exp(-dx * dx / (2.0 * len_ * len_));
}

double CorrelationKernel::spectral(double q, double hbar) const {
    if (kind_ == KernelKind::DeltaL3) return len_ * len_ * len_ / kTwoPiPow32;
    const double qL = q * len_ / hbar;
    return len_ * len_ * len_ * std::exp(-0.5 * qL * qL);
}

FormFactor::FormFactor(MassSpec spec) : spec_(spec) { spec_.validate(); }

double FormFactor::operator()(double q, double hbar) const {
    if (spec_.density == DensityKind::Point) return spec_.M;
    const double qR = q * spec_.R / hbar;
    return spec_.M * std::exp(-0.5 * qR * qR);
}

double position_rate_spectral(const NoiseSpec& noise, const FormFactor& ff, double dx,
                              const Scales& scales, double rel_tol) {
    noise.validate();
    if (noise.kernel != KernelKind::GaussianL)
        throw RegimeError("position_rate_spectral: spectral quadrature needs the Gaussian kernel");
    if (noise.alpha == 0.0) return 0.0;

    const double hbar = scales.hbar;
    const double c = scales.c;
    const CorrelationKernel kernel = CorrelationKernel::gaussian(noise.L);
    const double d = std::abs(dx);

    const double pref = 2.0 * noise.alpha * noise.alpha * noise.tau_c * std::pow(c, 4) *
                        noise.weights.w00 / (kTwoPiPow32 * std::pow(hbar, 5));

    // angular reduction leaves a smooth radial integrand against the Gaussian weight
    auto integrand = [&](double q) {
        const double m = ff(q, hbar);
        return 4.0 * M_PI * q * q * kernel.spectral(q, hbar) * m * m *
               (1.0 - sinc(q * d / hbar));
    };

    // saturation integral sets the absolute-error scale (dx -> 0 makes the
    // relative target meaningless)
    auto saturation = [&](double q) {
        const double m = ff(q, hbar);
        return 4.0 * M_PI * q * q * kernel.spectral(q, hbar) * m * m;
    };
    const double sat = quadrature::integrate_to_infinity(saturation, 0.0, 1e-10);
    const double abs_tol = rel_tol * sat;

    return pref * quadrature::integrate_to_infinity(integrand, 0.0, rel_tol, abs_tol);
}

double position_rate_gaussian_closed(const NoiseSpec& noise, const FormFactor& ff, double dx,
                                     const Scales& scales) {
    noise.validate();
    if (noise.kernel != KernelKind::GaussianL)
        throw RegimeError("position_rate_gaussian_closed: Gaussian kernel only");
    const double hbar = scales.hbar;
    const double c = scales.c;
    const double L = noise.L;
    const double R = ff.mass().density == DensityKind::GaussianR ? ff.mass().R : 0.0;
    const double s2 = L * L + 2.0 * R * R;
    const double M = ff.mass().M;
    const double pref = 2.0 * noise.alpha * noise.alpha * noise.tau_c * std::pow(c, 4) *
                        noise.weights.w00 * M * M * std::pow(L, 3) /
                        (hbar * hbar * std::pow(s2, 1.5));
    return pref * (1.0 - std::exp(-dx * dx / (2.0 * s2)));
}

double sanchez_gomez_rate(const SGParams& p, double dx, const Scales& scales) {
    const double pref = 2.0 * p.alpha * p.alpha * p.m * p.m * std::pow(scales.c, 3) * p.L /
                        (scales.hbar * scales.hbar);
    return pref * (1.0 - std::exp(-dx * dx / (2.0 * p.L * p.L)));
}

double blencowe_rate(const BlencoweParams& p, double dx, const Scales& scales) {
    const double pref = p.alpha * p.alpha * p.M * p.M * p.tau_c * std::pow(scales.c, 4) *
                        std::pow(p.l, 3) /
                        (4.0 * std::pow(M_PI, 1.5) * scales.hbar * scales.hbar * std::pow(p.R, 3));
    return pref * (1.0 - std::exp(-dx * dx / (4.0 * p.R * p.R)));
}

double blencowe_overlap_rate(const BlencoweParams& p, double dx, const Scales& scales,
                             double rel_tol) {
    // Gaussian mass density of total mass M and radius R
    const double norm = p.M / std::pow(std::sqrt(2.0 * M_PI) * p.R, 3);
    auto density = [&](double r) { return norm * std::exp(-0.5 * r * r / (p.R * p.R)); };

    const double d = std::abs(dx);
    // \int d^3r (m(r) - m(r - d))^2 = 2 [ \int m^2 - \int m(r) m(r - d) ]
    auto self_term = [&](double r) {
        const double m = density(r);
        return 4.0 * M_PI * r * r * m * m;
    };
    // cross term: inner angular integral over the relative orientation
    auto cross_term = [&](double r) {
        auto inner = [&](double mu) {
            const double rr = std::sqrt(std::max(0.0, r * r + d * d - 2.0 * r * d * mu));
            return density(rr);
        };
        const double ang = quadrature::integrate(inner, -1.0, 1.0, rel_tol);
        return 2.0 * M_PI * r * r * density(r) * ang;
    };

    const double i_self = quadrature::integrate_to_infinity(self_term, 0.0, rel_tol);
    const double abs_scale = rel_tol * 2.0 * i_self;
    const double i_cross =
        quadrature::integrate_to_infinity(cross_term, 0.0, rel_tol, abs_scale);

    const double pref = p.alpha * p.alpha * p.tau_c * std::pow(scales.c, 4) * std::pow(p.l, 3) /
                        (scales.hbar * scales.hbar);
    return pref * 2.0 * (i_self - i_cross);
}

namespace {

// shared radial integral \int d^3q u~(q) m~^2(q) / M^2 for one weight channel
double channel_integral(const NoiseSpec& noise, const FormFactor& ff, const Scales& scales,
                        double rel_tol) {
    if (noise.kernel != KernelKind::GaussianL)
        throw RegimeError("momentum_coefficients: spectral quadrature needs the Gaussian kernel");
    const double hbar = scales.hbar;
    const CorrelationKernel kernel = CorrelationKernel::gaussian(noise.L);
    const double M = ff.mass().M;
    auto integrand = [&](double q) {
        const double m = ff(q, hbar) / M;
        return 4.0 * M_PI * q * q * kernel.spectral(q, hbar) * m * m;
    };
    return quadrature::integrate_to_infinity(integrand, 0.0, rel_tol);
}

} // namespace

MomentumCoefficients momentum_coefficients(const NoiseSpec& noise, const FormFactor& ff,
                                           double lambda, const Scales& scales, double rel_tol) {
    noise.validate();
    MomentumCoefficients out;
    if (noise.alpha == 0.0) return out;
    const double base = noise.alpha * noise.alpha * lambda /
                        (kTwoPiPow32 * std::pow(scales.hbar, 5)) *
                        channel_integral(noise, ff, scales, rel_tol);
    out.C00 = base * noise.weights.w00;
    out.C0i = base * noise.weights.w0i;
    out.Cij = base * noise.weights.wij;
    return out;
}

MomentumCoefficients momentum_coefficients_closed(const NoiseSpec& noise, const FormFactor& ff,
                                                  double lambda, const Scales& scales) {
    noise.validate();
    if (noise.kernel != KernelKind::GaussianL)
        throw RegimeError("momentum_coefficients_closed: Gaussian kernel only");
    const double R = ff.mass().density == DensityKind::GaussianR ? ff.mass().R : 0.0;
    const double s2 = noise.L * noise.L + 2.0 * R * R;
    const double base = noise.alpha * noise.alpha * lambda * std::pow(noise.L, 3) /
                        (scales.hbar * scales.hbar * std::pow(s2, 1.5));
    MomentumCoefficients out;
    out.C00 = base * noise.weights.w00;
    out.C0i = base * noise.weights.w0i;
    out.Cij = base * noise.weights.wij;
    return out;
}

AxisMarginal axis_marginal(const NoiseSpec& noise, const FormFactor& ff, const Scales& scales) {
    noise.validate();
    const double hbar = scales.hbar;
    const double R = ff.mass().density == DensityKind::GaussianR ? ff.mass().R : 0.0;
    AxisMarginal out;
    if (noise.kernel == KernelKind::GaussianL) {
        const double s2 = noise.L * noise.L + 2.0 * R * R;
        out.s = std::sqrt(s2);
        out.amplitude = std::pow(noise.L, 3) * 2.0 * M_PI * hbar * hbar / s2;
        return out;
    }
    // delta kernel: flat spectrum; the transverse integral converges only
    // through the Gaussian form factor
    if (R == 0.0)
        throw CapacityError(
            "axis_marginal: delta kernel with a point mass has no finite spectral weight; "
            "use the closed-form rates instead");
    const double s2 = 2.0 * R * R;
    out.s = std::sqrt(s2);
    out.amplitude = std::pow(noise.l, 3) / kTwoPiPow32 * 2.0 * M_PI * hbar * hbar / s2;
    return out;
}

} // namespace gravdec::kernels
