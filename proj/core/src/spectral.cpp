#include "consensus_lab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "consensus_lab/error.hpp"

namespace consensus_lab {
namespace {

constexpr double kRealThreshold = 1e-8;
constexpr double kPositiveRealTolerance = 1e-10;

// Tarjan's algorithm on the pattern graph i -> j for m(i, j) != 0.
std::vector<std::vector<Eigen::Index>> strongly_connected_blocks(const Matrix& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> index(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> stack;
  std::vector<std::vector<Eigen::Index>> blocks;
  Eigen::Index counter = 0;

  std::function<void(Eigen::Index)> visit = [&](Eigen::Index v) {
    const auto vs = static_cast<std::size_t>(v);
    index[vs] = low[vs] = counter++;
    stack.push_back(v);
    on_stack[vs] = true;
    for (Eigen::Index w = 0; w < n; ++w) {
      if (w == v || m(v, w) == 0.0) continue;
      const auto ws = static_cast<std::size_t>(w);
      if (index[ws] < 0) {
        visit(w);
        low[vs] = std::min(low[vs], low[ws]);
      } else if (on_stack[ws]) {
        low[vs] = std::min(low[vs], index[ws]);
      }
    }
    if (low[vs] == index[vs]) {
      std::vector<Eigen::Index> block;
      Eigen::Index w = -1;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[static_cast<std::size_t>(w)] = false;
        block.push_back(w);
      } while (w != v);
      std::sort(block.begin(), block.end());
      blocks.push_back(std::move(block));
    }
  };

  for (Eigen::Index v = 0; v < n; ++v) {
    if (index[static_cast<std::size_t>(v)] < 0) visit(v);
  }
  return blocks;
}

double smallest_singular_value(const Matrix& m, Complex lambda) {
  Eigen::MatrixXcd shifted = m.cast<Complex>();
  shifted.diagonal().array() -= lambda;
  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted);
  return svd.singularValues().minCoeff();
}

[[noreturn]] void uncertified(Complex v, double residual, double bound) {
  fail(ErrorKind::kNumerical,
       fmt::format("eigenvalue ({}, {}) failed certification: residual {} > {}", v.real(),
                   v.imag(), residual, bound));
}

// Eigenvalues of a diagonal block are eigenvalues of the whole block-triangular
// matrix, and a small residual on the block bounds the backward error of the
// whole. The eigenvector residual is an upper bound on the smallest singular
// value of (block - lambda I); the SVD is only needed when it is loose.
void append_block_eigenvalues(const Matrix& m, const std::vector<Eigen::Index>& block,
                              double bound, std::vector<Complex>& out) {
  if (block.size() == 1) {
    out.emplace_back(m(block[0], block[0]), 0.0);
    return;
  }
  const auto size = static_cast<Eigen::Index>(block.size());
  Matrix sub(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      sub(i, j) = m(block[static_cast<std::size_t>(i)], block[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::EigenSolver<Matrix> solver(sub, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::kNumerical,
         fmt::format("eigenvalue iteration did not converge on a {}x{} block", size, size));
  }
  const Eigen::MatrixXcd vectors = solver.eigenvectors();
  const Eigen::MatrixXcd complex_sub = sub.cast<Complex>();
  for (Eigen::Index i = 0; i < size; ++i) {
    const Complex lambda = solver.eigenvalues()(i);
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
      fail(ErrorKind::kNumerical, "eigenvalue iteration produced a non-finite value");
    }
    const Eigen::VectorXcd v = vectors.col(i);
    double residual = (complex_sub * v - lambda * v).norm() / v.norm();
    if (!(residual <= bound)) residual = smallest_singular_value(sub, lambda);
    if (!(residual <= bound)) uncertified(lambda, residual, bound);
    out.push_back(lambda);
  }
}

bool spectral_order(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) < std::abs(b.imag());
  return a.imag() > b.imag();
}

}  // namespace

std::vector<Complex> eigenvalues(const Matrix& m, double tol) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    fail(ErrorKind::kValidation,
         fmt::format("eigenvalues need a non-empty square matrix, got {}x{}", m.rows(), m.cols()));
  }
  if (!m.allFinite()) fail(ErrorKind::kValidation, "matrix has non-finite entries");

  std::vector<Complex> values;
  values.reserve(static_cast<std::size_t>(m.rows()));
  const double bound = tol * m.norm();
  for (const auto& block : strongly_connected_blocks(m)) {
    append_block_eigenvalues(m, block, bound, values);
  }
  std::sort(values.begin(), values.end(), spectral_order);
  return values;
}

bool is_numerically_real(Complex lambda) noexcept {
  return std::abs(lambda.imag()) <= kRealThreshold * std::max(1.0, std::abs(lambda));
}

SpectralSummary summarize(std::vector<Complex> values) {
  if (values.empty()) fail(ErrorKind::kValidation, "empty spectrum");
  double largest_modulus = 0.0;
  for (const Complex& v : values) largest_modulus = std::max(largest_modulus, std::abs(v));
  for (const Complex& v : values) {
    if (v.real() <= kPositiveRealTolerance * std::max(1.0, largest_modulus)) {
      fail(ErrorKind::kValidation,
           fmt::format("eigenvalue ({}, {}) has non-positive real part; the source does not "
                       "reach every agent",
                       v.real(), v.imag()));
    }
  }

  SpectralSummary summary;
  summary.is_real_spectrum =
      std::all_of(values.begin(), values.end(), [](Complex v) { return is_numerically_real(v); });
  if (summary.is_real_spectrum) {
    for (Complex& v : values) v = Complex(v.real(), 0.0);
    std::sort(values.begin(), values.end(), spectral_order);
    summary.lambda_min = values.front().real();
    summary.lambda_max = values.back().real();
    summary.extremal_distinct = *summary.lambda_min != summary.lambda_max;
  } else {
    summary.lambda_max = largest_modulus;
    summary.extremal_distinct = true;
  }
  summary.eigenvalues = std::move(values);
  return summary;
}

SpectralSummary summarize(const PinnedSystem& system) {
  validate(system);
  return summarize(eigenvalues(system.K));
}

}  // namespace consensus_lab
