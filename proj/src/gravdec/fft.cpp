#include "gravdec/fft.hpp"

#include <map>
#include <mutex>

#include <fftw3.h>

namespace gravdec::fft {

namespace {

// Cached plans per (n, sign).  FFTW_UNALIGNED lets the same plan run on any
// caller buffer via fftw_execute_dft.
class PlanCache {
public:
    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> buf(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(n, buf.data(), buf.data(), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(Complex* data, int n, int sign) {
    fftw_plan p = cache().get(n, sign);
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, raw, raw);
}

} // namespace

void forward(Complex* data, int n) { execute(data, n, FFTW_FORWARD); }
void backward(Complex* data, int n) { execute(data, n, FFTW_BACKWARD); }

void to_momentum(Vector& psi) {
    const int n = static_cast<int>(psi.size());
    forward(psi.data(), n);
    psi *= 1.0 / std::sqrt(static_cast<double>(n));
}

void to_position(Vector& psi) {
    const int n = static_cast<int>(psi.size());
    backward(psi.data(), n);
    psi *= 1.0 / std::sqrt(static_cast<double>(n));
}

void to_momentum(Matrix& rho) {
    // F rho F^dagger = (G_cols rho B_rows) / n with G/B the unnormalized DFTs
    const int n = static_cast<int>(rho.rows());
    for (int j = 0; j < n; ++j) forward(rho.col(j).data(), n);
    // rows are strided; transform via a contiguous scratch column
    Vector scratch(n);
    for (int i = 0; i < n; ++i) {
        scratch = rho.row(i).transpose();
        backward(scratch.data(), n);
        rho.row(i) = scratch.transpose();
    }
    rho *= 1.0 / static_cast<double>(n);
}

void to_position(Matrix& rho) {
    const int n = static_cast<int>(rho.rows());
    for (int j = 0; j < n; ++j) backward(rho.col(j).data(), n);
    Vector scratch(n);
    for (int i = 0; i < n; ++i) {
        scratch = rho.row(i).transpose();
        forward(scratch.data(), n);
        rho.row(i) = scratch.transpose();
    }
    rho *= 1.0 / static_cast<double>(n);
}

} // namespace gravdec::fft
