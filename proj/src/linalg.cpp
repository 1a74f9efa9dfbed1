#include "safel2o/linalg.hpp"

#include <cmath>

#include "safel2o/errors.hpp"
#include "safel2o/rng.hpp"

namespace safel2o {

double spectral_norm_sq(const Matrix& a, double tol, int max_iter) {
  if (a.size() == 0 || a.norm() == 0.0) throw ConfigError("spectral_norm: matrix is zero");
  // Seed folds in the shape so different problems do not share a start vector,
  // but the value is fixed for a given shape: reruns are bit-identical.
  Rng rng(0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(a.rows()) << 32) ^
          static_cast<std::uint64_t>(a.cols()));
  Vector v = rng.normal_vector(static_cast<int>(a.cols()));
  v.normalize();
  double value = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector av = a * v;
    double next = av.squaredNorm();  // Rayleigh quotient of A^T A at unit v
    Vector w = a.transpose() * av;
    double wn = w.norm();
    if (wn == 0.0) {
      // Start vector landed in the null space; redraw and keep iterating.
      v = rng.normal_vector(static_cast<int>(a.cols())).normalized();
      continue;
    }
    v = w / wn;
    if (it > 0 && std::abs(next - value) <= tol * std::max(next, 1e-300)) return next;
    value = next;
  }
  throw NumericError("spectral_norm: power iteration did not converge", value);
}

Matrix sqrt_psd(const Matrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("sqrt_psd: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) throw NumericError("sqrt_psd: eigendecomposition failed");
  Vector lam = eig.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-12)
      throw ConfigError("sqrt_psd: matrix is not positive semidefinite (eigenvalue " +
                        std::to_string(lam[i]) + ")");
    lam[i] = lam[i] > 0.0 ? std::sqrt(lam[i]) : 0.0;
  }
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace safel2o
