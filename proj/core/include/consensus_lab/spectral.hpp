#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "consensus_lab/graph.hpp"

namespace consensus_lab {

using Complex = std::complex<double>;

/// Eigenvalues of a dense real matrix, listed with multiplicity. Conjugate
/// pairs are adjacent (positive imaginary part first); the list is sorted by
/// real part.
///
/// The matrix is first permuted to block upper-triangular form along the
/// strongly connected components of its sparsity pattern; 1x1 blocks give their
/// diagonal entry exactly and larger blocks go through a Hessenberg QR solver.
/// This keeps the repeated eigenvalues of leader-follower chains exact instead of
/// scattering them into spurious complex clusters.
///
/// Every eigenvalue is certified: the smallest singular value of (M - lambda I)
/// must be at most tol * ||M||_F. Throws Error(kNumerical) otherwise, or when
/// the QR iteration does not converge.
std::vector<Complex> eigenvalues(const Matrix& m, double tol = 1e-9);

struct SpectralSummary {
  std::vector<Complex> eigenvalues;
  bool is_real_spectrum = false;
  /// Smallest eigenvalue; only set for a real spectrum.
  std::optional<double> lambda_min;
  /// Largest eigenvalue for a real spectrum, spectral radius of K otherwise.
  double lambda_max = 0.0;
  /// lambda_min != lambda_max. Always true for complex spectra.
  bool extremal_distinct = true;
};

/// |Im| <= 1e-8 * max(1, |lambda|) counts as real.
bool is_numerically_real(Complex lambda) noexcept;

/// Classifies the spectrum of K. Real spectra have their imaginary parts
/// snapped to zero and are sorted ascending. Throws Error(kValidation) if any
/// eigenvalue has a non-positive real part (the graph is not rooted).
SpectralSummary summarize(const PinnedSystem& system);
SpectralSummary summarize(std::vector<Complex> eigenvalues);

}  // namespace consensus_lab
