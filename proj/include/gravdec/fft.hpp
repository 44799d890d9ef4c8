// fft.hpp — FFTW-backed transforms for grid states and density matrices
//
// Plans are created with FFTW_ESTIMATE so the algorithm choice (and hence the
// exact rounding) depends only on the transform size, keeping runs
// bit-reproducible.  Plan creation is serialized; execution on caller-owned
// buffers is safe from any thread.

#pragma once

#include "gravdec/model.hpp"

namespace gravdec::fft {

// In-place unnormalized DFT of a length-n complex vector.
void forward(Complex* data, int n);  // sum_j v_j e^{-2 pi i jk/n}
void backward(Complex* data, int n); // sum_k v_k e^{+2 pi i jk/n}

// Unitary transforms of a ket between position and momentum (FFT node order).
void to_momentum(Vector& psi);
void to_position(Vector& psi);

// Density-matrix change of basis: rho_mom = F rho F^dagger and back,
// with F the unitary DFT matrix.
void to_momentum(Matrix& rho);
void to_position(Matrix& rho);

} // namespace gravdec::fft
