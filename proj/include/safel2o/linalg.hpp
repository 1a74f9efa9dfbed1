#pragma once

#include "safel2o/types.hpp"

namespace safel2o {

// Largest eigenvalue of A^T A (squared spectral norm of A) by power iteration
// on v -> A^T (A v). Deterministic: the start vector is drawn from a fixed
// internal seed. Converges when the Rayleigh quotient changes by at most
// tol * value between sweeps; throws NumericError carrying the best estimate
// if max_iter sweeps do not reach that, and ConfigError if A is zero.
double spectral_norm_sq(const Matrix& a, double tol = 1e-10, int max_iter = 10000);

// Symmetric PSD square root via eigendecomposition. Eigenvalues below
// -1e-12 mean the argument is not PSD and raise ConfigError; values in
// [-1e-12, 0] are clamped to zero.
Matrix sqrt_psd(const Matrix& m);

}  // namespace safel2o
