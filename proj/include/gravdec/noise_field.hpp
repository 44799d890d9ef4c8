// noise_field.hpp — Gaussian random field realizations on the periodic grid
//
// Spectral synthesis: independent complex Gaussians per momentum node with
// Hermitian symmetry enforced, scaled so the per-step covariance is
//   E[h(x) h(y)] = weight * alpha^2 lambda u(x - y) / dt
// (white in time realized as step-wise independence with 1/dt variance).
// The spectral amplitudes come from the DFT of the periodically wrapped
// kernel, so translation invariance on the grid is exact.

#pragma once

#include <cstdint>
#include <vector>

#include "gravdec/kernels.hpp"
#include "gravdec/model.hpp"

namespace gravdec::noise_field {

class FieldSampler {
public:
    // component_tag separates the h00/h0i/hij streams; weight is the block's
    // relative correlation strength.  When smear_with_mass is set, amplitudes
    // are filtered by m~(q)/M so the field is the mass-density-convolved one
    // seen by an extended body.
    FieldSampler(const NoiseSpec& noise, const Grid1D& grid, double dt, double lambda,
                 double weight, std::uint64_t master_seed, std::uint64_t component_tag,
                 const kernels::FormFactor* smear_with_mass = nullptr);

    // one independent realization per (trajectory, step); real-valued field
    void sample(std::uint64_t trajectory, std::uint64_t step, RealVector& out) const;
    RealVector sample(std::uint64_t trajectory, std::uint64_t step) const;

    const RealVector& spectral_amplitude() const { return amp_; }
    double lambda() const { return lambda_; }
    double dt() const { return dt_; }

private:
    Grid1D grid_;
    double dt_;
    double lambda_;
    std::uint64_t key_;
    RealVector amp_; // per-momentum-node amplitude of the unit complex Gaussians
};

struct CovarianceTable {
    RealVector lag;      // lag distances (grid multiples)
    RealVector cov;      // unbiased covariance estimate per lag
    RealVector std_err;  // standard error per lag
    int samples = 0;
};

// Per-lag covariance across >= 100 sampled fields (circular stationarity).
CovarianceTable empirical_covariance(const std::vector<RealVector>& samples, double dx);

} // namespace gravdec::noise_field
