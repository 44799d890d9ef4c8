#include "gravdec/noise_field.hpp"

#include <cmath>

#include "gravdec/errors.hpp"
#include "gravdec/fft.hpp"
#include "gravdec/rng.hpp"

namespace gravdec::noise_field {

FieldSampler::FieldSampler(const NoiseSpec& noise, const Grid1D& grid, double dt, double lambda,
                           double weight, std::uint64_t master_seed,
                           std::uint64_t component_tag, const kernels::FormFactor* smear)
    : grid_(grid), dt_(dt), lambda_(lambda) {
    noise.validate();
    grid.validate();
    if (!(dt > 0.0)) throw ValidationError({"sampler.dt"});
    if (!(lambda >= 0.0)) throw ValidationError({"sampler.lambda"});
    if (!(weight >= 0.0)) throw ValidationError({"sampler.weight"});

    key_ = rng::mix_key(master_seed, component_tag);

    const int n = grid.n;
    const double variance = weight * noise.alpha * noise.alpha * lambda / dt;

    // DFT of the wrapped kernel row gives the circulant eigenvalues
    Vector u(n);
    if (noise.kernel == KernelKind::GaussianL) {
        for (int j = 0; j < n; ++j) {
            const double d = std::min(j, n - j) * grid.dx();
            u(j) = std::exp(-0.5 * d * d / (noise.L * noise.L));
        }
    } else {
        // delta kernel reduced to the grid: correlation volume per cell volume
        u = Vector::Zero(n);
        u(0) = std::pow(noise.l / grid.dx(), 3);
    }
    fft::forward(u.data(), n);

    amp_.resize(n);
    for (int k = 0; k < n; ++k) {
        double uk = u(k).real();
        if (uk < 0.0) uk = 0.0; // rounding guard; wrapped kernels are PSD
        double a = std::sqrt(variance * uk / n);
        if (smear) a *= (*smear)(grid.p(k), 1.0) / smear->mass().M;
        amp_(k) = a;
    }
}

void FieldSampler::sample(std::uint64_t trajectory, std::uint64_t step, RealVector& out) const {
    const int n = grid_.n;
    out.resize(n);

    rng::Stream stream = rng::Stream::keyed(key_, trajectory, step);

    // Hermitian spectral coefficients: c_k = amp_k xi_k, c_{n-k} = conj(c_k)
    Vector c(n);
    double a, b;
    stream.next_gaussian_pair(a, b);
    c(0) = amp_(0) * a;
    if (n % 2 == 0) c(n / 2) = amp_(n / 2) * b;
    for (int k = 1; k < n / 2; ++k) {
        stream.next_gaussian_pair(a, b);
        const Complex xi(a * M_SQRT1_2, b * M_SQRT1_2);
        c(k) = amp_(k) * xi;
        c(n - k) = std::conj(c(k));
    }

    fft::backward(c.data(), n);
    for (int j = 0; j < n; ++j) out(j) = c(j).real();
}

RealVector FieldSampler::sample(std::uint64_t trajectory, std::uint64_t step) const {
    RealVector out;
    sample(trajectory, step, out);
    return out;
}

CovarianceTable empirical_covariance(const std::vector<RealVector>& samples, double dx) {
    if (samples.size() < 100)
        throw ValidationError({"empirical_covariance: needs at least 100 samples"});
    const int n = static_cast<int>(samples.front().size());
    const int n_lags = n / 2 + 1;
    const auto m = static_cast<double>(samples.size());

    CovarianceTable table;
    table.samples = static_cast<int>(samples.size());
    table.lag.resize(n_lags);
    table.cov.resize(n_lags);
    table.std_err.resize(n_lags);

    for (int lag = 0; lag < n_lags; ++lag) {
        table.lag(lag) = lag * dx;
        double sum = 0.0, sum2 = 0.0;
        for (const RealVector& h : samples) {
            // circular average over positions within one sample
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += h(j) * h((j + lag) % n);
            acc /= n;
            sum += acc;
            sum2 += acc * acc;
        }
        const double mean = sum / m;
        const double var = std::max(0.0, (sum2 - m * mean * mean) / (m - 1.0));
        table.cov(lag) = mean;
        table.std_err(lag) = std::sqrt(var / m);
    }
    return table;
}

} // namespace gravdec::noise_field
