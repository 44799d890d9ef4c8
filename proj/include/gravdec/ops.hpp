// ops.hpp — dense grid operators shared by generators, oracle, and tests

#pragma once

#include "gravdec/fft.hpp"
#include "gravdec/model.hpp"

namespace gravdec::ops {

// diag(x_j)
inline Matrix position_operator(const Grid1D& grid) {
    Matrix X = Matrix::Zero(grid.n, grid.n);
    for (int j = 0; j < grid.n; ++j) X(j, j) = grid.x(j);
    return X;
}

// diag(e^{i q x_j / hbar})
inline Matrix phase_operator(const Grid1D& grid, double q, double hbar = 1.0) {
    Matrix E = Matrix::Zero(grid.n, grid.n);
    for (int j = 0; j < grid.n; ++j)
        E(j, j) = std::exp(Complex(0.0, q * grid.x(j) / hbar));
    return E;
}

// circulant operator F^dagger diag(f(p_k)) F from its momentum-space symbol
inline Matrix from_momentum_symbol(const Grid1D& grid, const RealVector& symbol) {
    const int n = grid.n;
    Vector col(n);
    for (int k = 0; k < n; ++k) col(k) = symbol(k);
    fft::backward(col.data(), n);
    col /= static_cast<double>(n);
    Matrix op(n, n);
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) op(j, m) = col((j - m + n) % n);
    return op;
}

// P on the periodic grid (FFT-diagonal)
inline Matrix momentum_operator(const Grid1D& grid, double hbar = 1.0) {
    RealVector p(grid.n);
    for (int k = 0; k < grid.n; ++k) p(k) = grid.p(k, hbar);
    return from_momentum_symbol(grid, p);
}

// P^2 / 2M
inline Matrix kinetic_operator(const Grid1D& grid, double mass, double hbar = 1.0) {
    RealVector e(grid.n);
    for (int k = 0; k < grid.n; ++k) {
        const double p = grid.p(k, hbar);
        e(k) = p * p / (2.0 * mass);
    }
    return from_momentum_symbol(grid, e);
}

inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

} // namespace gravdec::ops
