#include "nyk/datasets.hpp"

#include <cmath>
#include <random>

namespace nyk {

MatrixXd dataset_kernel(const LabeledDataset& d) {
  if (d.K.rows() > 0) return d.K;
  if (!d.vectorial()) throw validation_error("dataset has neither points nor a kernel matrix");
  return kernel_matrix(d.kernel, d.X);
}

MatrixXd dataset_kernel_block(const LabeledDataset& d, const std::vector<Index>& rows,
                              const std::vector<Index>& cols) {
  if (d.K.rows() > 0) {
    MatrixXd B(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) B(static_cast<Index>(i), static_cast<Index>(j)) = d.K(rows[i], cols[j]);
    return B;
  }
  if (!d.vectorial()) throw validation_error("dataset has neither points nor a kernel matrix");
  MatrixXd A(static_cast<Index>(rows.size()), d.X.cols());
  MatrixXd B(static_cast<Index>(cols.size()), d.X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) A.row(static_cast<Index>(i)) = d.X.row(rows[i]);
  for (std::size_t j = 0; j < cols.size(); ++j) B.row(static_cast<Index>(j)) = d.X.row(cols[j]);
  return kernel_cross(d.kernel, A, B);
}

LabeledDataset gen_ball(Index n_per_class, std::uint64_t seed) {
  if (n_per_class < 2) throw validation_error("gen_ball: need at least 2 balls per class");
  const Index n = 2 * n_per_class;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 10.0);

  MatrixXd centers(n, 3);
  VectorXd radii(n);
  LabeledDataset d;
  d.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < 3; ++c) centers(i, c) = unif(rng);
    const bool first = i < n_per_class;
    radii[i] = first ? 1.0 : 1.1;
    d.labels[static_cast<std::size_t>(i)] = first ? 1 : -1;
  }

  // squared surface distances, then double centering -> indefinite similarity matrix
  MatrixXd D(n, n);
  for (Index i = 0; i < n; ++i) {
    D(i, i) = 0.0;
    for (Index j = 0; j < i; ++j) {
      const double surf =
          std::max(0.0, (centers.row(i) - centers.row(j)).norm() - radii[i] - radii[j]);
      D(i, j) = surf * surf;
      D(j, i) = D(i, j);
    }
  }
  d.K = double_center(D);
  return d;
}

LabeledDataset gen_checkerboard(Index n, std::uint64_t seed) {
  if (n < 2) throw validation_error("gen_checkerboard: n must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  LabeledDataset d;
  d.X.resize(n, 2);
  d.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    d.X(i, 0) = unif(rng);
    d.X(i, 1) = unif(rng);
    const int parity =
        (static_cast<int>(std::floor(d.X(i, 0))) + static_cast<int>(std::floor(d.X(i, 1)))) % 2;
    d.labels[static_cast<std::size_t>(i)] = parity == 0 ? 1 : -1;
  }
  d.kernel.kind = KernelKind::elm_arcsine;
  d.kernel.sigma = 1.0;
  return d;
}

LabeledDataset gen_gauss_overlap(Index n, std::uint64_t seed) {
  if (n < 2) throw validation_error("gen_gauss_overlap: n must be at least 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  LabeledDataset d;
  d.X.resize(n, 2);
  d.labels.resize(static_cast<std::size_t>(n));
  const Index half = n / 2;
  for (Index i = 0; i < n; ++i) {
    const bool first = i < half;
    d.X(i, 0) = norm(rng) + (first ? 0.0 : 2.0);
    d.X(i, 1) = norm(rng);
    d.labels[static_cast<std::size_t>(i)] = first ? 1 : -1;
  }
  d.kernel.kind = KernelKind::elm_arcsine;
  d.kernel.sigma = 1.0;
  return d;
}

LabeledDataset gen_pe_gaussians(Index n, std::uint64_t seed) {
  if (n < 2) throw validation_error("gen_pe_gaussians: n must be at least 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  LabeledDataset d;
  d.X.resize(n, 2);
  d.labels.resize(static_cast<std::size_t>(n));
  const Index half = n / 2;
  for (Index i = 0; i < n; ++i) {
    const bool first = i < half;
    const double mx = first ? 0.0 : 2.12, my = first ? 0.0 : 2.12;
    d.X(i, 0) = norm(rng) + mx;
    d.X(i, 1) = norm(rng) + my;
    d.labels[static_cast<std::size_t>(i)] = first ? 1 : -1;
  }
  d.kernel.kind = KernelKind::pe_signature;
  return d;
}

LabeledDataset gen_magnification(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  LabeledDataset d;
  d.X = MatrixXd::Zero(540, 10);
  d.labels.assign(540, -1);
  for (Index i = 0; i < 500; ++i) {
    d.X(i, 0) = norm(rng);
    d.X(i, 1) = norm(rng);
    for (Index c = 3; c < 10; ++c) d.X(i, c) = 0.05 * norm(rng);
  }
  for (Index i = 500; i < 520; ++i) {
    d.X(i, 2) = 1.3 + 0.2 * norm(rng);
    d.labels[static_cast<std::size_t>(i)] = 1;
  }
  for (Index i = 520; i < 540; ++i) {
    d.X(i, 2) = 2.6 + 0.2 * norm(rng);
    d.labels[static_cast<std::size_t>(i)] = 1;
  }
  d.kernel.kind = KernelKind::linear;
  return d;
}

}  // namespace nyk
