#include "nyk/proximity.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace nyk {

void require_symmetric(const MatrixXd& K, double tol) {
  if (K.rows() != K.cols()) {
    throw validation_error("matrix is not square: " + std::to_string(K.rows()) + " x " +
                           std::to_string(K.cols()));
  }
  if (K.rows() < 1) throw validation_error("empty matrix");
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  const double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw validation_error("matrix is not symmetric: max asymmetry " + std::to_string(asym));
  }
}

MatrixXd sim_to_dissim(const MatrixXd& K, double symmetry_tol) {
  require_symmetric(K, symmetry_tol);
  const Index n = K.rows();
  const VectorXd d = K.diagonal();
  MatrixXd D = d.replicate(1, n) + d.transpose().replicate(n, 1) - 2.0 * K;
  D.diagonal().setZero();
  return D;
}

MatrixXd double_center(const MatrixXd& D) {
  require_symmetric(D);
  if (D.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw validation_error("double_center: dissimilarity diagonal must be exactly zero");
  }
  const Index n = D.rows();
  const VectorXd row_mean = D.rowwise().mean();
  const double total_mean = D.mean();
  // -J D J / 2 expanded; keeps everything O(N^2) with one pass.
  MatrixXd S = -0.5 * (D - row_mean.replicate(1, n) - row_mean.transpose().replicate(n, 1) +
                       MatrixXd::Constant(n, n, total_mean));
  return 0.5 * (S + S.transpose());  // kill rounding asymmetry
}

PeEmbedding pe_embedding(const MatrixXd& S, double zero_tol) {
  require_symmetric(S);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw numerical_error("pe_embedding: eigensolver failed");
  const VectorXd lam = es.eigenvalues();
  const double amax = lam.cwiseAbs().maxCoeff();
  const double cut = zero_tol * amax;

  std::vector<Index> pos, neg;
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i] > cut) pos.push_back(i);
    else if (lam[i] < -cut) neg.push_back(i);
  }
  // descending |lambda| inside each block
  std::sort(pos.begin(), pos.end(), [&](Index a, Index b) { return lam[a] > lam[b]; });
  std::sort(neg.begin(), neg.end(), [&](Index a, Index b) { return lam[a] < lam[b]; });

  PeEmbedding out;
  out.sig.p = static_cast<Index>(pos.size());
  out.sig.q = static_cast<Index>(neg.size());
  out.sig.z = lam.size() - out.sig.p - out.sig.q;
  out.V.resize(S.rows(), out.sig.p + out.sig.q);
  out.eigvals.resize(out.sig.p + out.sig.q);
  Index c = 0;
  for (Index i : pos) {
    out.V.col(c) = es.eigenvectors().col(i) * std::sqrt(lam[i]);
    out.eigvals[c++] = lam[i];
  }
  for (Index i : neg) {
    out.V.col(c) = es.eigenvectors().col(i) * std::sqrt(-lam[i]);
    out.eigvals[c++] = lam[i];
  }
  return out;
}

// --- kernels ----------------------------------------------------------------------------------

namespace {

double elm_arcsine(const Eigen::Ref<const VectorXd>& a, const Eigen::Ref<const VectorXd>& b,
                   double sigma) {
  const double s2 = 2.0 * sigma * sigma;
  const double num = 1.0 + s2 * a.dot(b);
  const double da = 1.0 + s2 * a.squaredNorm() + s2;
  const double db = 1.0 + s2 * b.squaredNorm() + s2;
  double r = num / std::sqrt(da * db);
  r = std::clamp(r, -1.0, 1.0);  // rounding can push |r| past 1 for identical points
  return (2.0 / std::numbers::pi) * std::asin(r);
}

}  // namespace

double KernelFunction::operator()(const Eigen::Ref<const VectorXd>& a,
                                  const Eigen::Ref<const VectorXd>& b) const {
  if (a.size() != b.size()) throw validation_error("kernel: dimension mismatch");
  switch (kind) {
    case KernelKind::linear:
      return a.dot(b);
    case KernelKind::rbf:
      return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
    case KernelKind::neg_manhattan:
      return -(a - b).cwiseAbs().sum();
    case KernelKind::tanh_sigmoid:
      return std::tanh(scale * a.dot(b) + offset);
    case KernelKind::elm_arcsine:
      return elm_arcsine(a, b, sigma);
    case KernelKind::pe_signature:
      if (a.size() != 2) throw validation_error("pe_signature kernel expects 2-D points");
      return a[0] * b[0] - a[1] * b[1];
  }
  throw validation_error("unknown kernel kind");
}

MatrixXd kernel_matrix(const KernelFunction& k, const MatrixXd& X) {
  const Index n = X.rows();
  MatrixXd K(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double v = k(X.row(i).transpose(), X.row(j).transpose());
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

MatrixXd kernel_cross(const KernelFunction& k, const MatrixXd& A, const MatrixXd& B) {
  MatrixXd C(A.rows(), B.rows());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < B.rows(); ++j)
      C(i, j) = k(A.row(i).transpose(), B.row(j).transpose());
  return C;
}

// --- Nystrom factors ---------------------------------------------------------------------------

MatrixXd sym_pinv(const MatrixXd& A, double rel_tol) {
  require_symmetric(A, 1e-8);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()));
  if (es.info() != Eigen::Success) throw numerical_error("sym_pinv: eigensolver failed");
  const VectorXd lam = es.eigenvalues();
  const double amax = lam.cwiseAbs().maxCoeff();
  VectorXd inv = VectorXd::Zero(lam.size());
  for (Index i = 0; i < lam.size(); ++i)
    if (std::abs(lam[i]) > rel_tol * amax) inv[i] = 1.0 / lam[i];
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

void check_landmarks(const std::vector<Index>& lm, Index n) {
  if (lm.empty()) throw validation_error("nystrom_factorize: empty landmark set");
  if (static_cast<Index>(lm.size()) > n)
    throw validation_error("nystrom_factorize: more landmarks than points");
  for (std::size_t i = 1; i < lm.size(); ++i)
    if (lm[i] == lm[i - 1]) throw validation_error("nystrom_factorize: duplicate landmark index");
  if (lm.front() < 0 || lm.back() >= n)
    throw validation_error("nystrom_factorize: landmark index out of range");
}

}  // namespace

NystromFactors nystrom_factorize(const MatrixXd& K, std::vector<Index> landmarks) {
  require_symmetric(K, 1e-8);
  std::sort(landmarks.begin(), landmarks.end());
  check_landmarks(landmarks, K.rows());
  NystromFactors F;
  F.n = K.rows();
  F.landmarks = std::move(landmarks);
  const Index m = F.m();
  F.cross.resize(F.n, m);
  for (Index j = 0; j < m; ++j) F.cross.col(j) = K.col(F.landmarks[j]);
  F.landmark_block.resize(m, m);
  for (Index i = 0; i < m; ++i) F.landmark_block.row(i) = F.cross.row(F.landmarks[i]);
  F.landmark_block = 0.5 * (F.landmark_block + F.landmark_block.transpose().eval());
  for (Index i = 0; i < m; ++i) F.cross.row(F.landmarks[i]) = F.landmark_block.row(i);
  F.landmark_block_pinv = sym_pinv(F.landmark_block);
  return F;
}

NystromFactors nystrom_factorize(const KernelFunction& k, const MatrixXd& X,
                                 std::vector<Index> landmarks) {
  std::sort(landmarks.begin(), landmarks.end());
  check_landmarks(landmarks, X.rows());
  NystromFactors F;
  F.n = X.rows();
  F.landmarks = std::move(landmarks);
  const Index m = F.m();
  MatrixXd L(m, X.cols());
  for (Index j = 0; j < m; ++j) L.row(j) = X.row(F.landmarks[j]);
  F.cross = kernel_cross(k, X, L);
  F.landmark_block.resize(m, m);
  for (Index i = 0; i < m; ++i) F.landmark_block.row(i) = F.cross.row(F.landmarks[i]);
  F.landmark_block = 0.5 * (F.landmark_block + F.landmark_block.transpose().eval());
  for (Index i = 0; i < m; ++i) F.cross.row(F.landmarks[i]) = F.landmark_block.row(i);
  F.landmark_block_pinv = sym_pinv(F.landmark_block);
  return F;
}

MatrixXd nystrom_reconstruct(const NystromFactors& F) {
  return F.cross * F.landmark_block_pinv * F.cross.transpose();
}

VectorXd nystrom_extend(const NystromFactors& F, const VectorXd& k_new) {
  if (k_new.size() != F.m())
    throw validation_error("nystrom_extend: expected " + std::to_string(F.m()) +
                           " landmark evaluations, got " + std::to_string(k_new.size()));
  return F.cross * (F.landmark_block_pinv * k_new);
}

VectorXd row_sums(const NystromFactors& F) {
  const VectorXd s = F.cross.colwise().sum().transpose();  // cross^T 1
  return F.cross * (F.landmark_block_pinv * s);
}

VectorXd row_sums_subset(const NystromFactors& F, const std::vector<Index>& subset) {
  VectorXd s = VectorXd::Zero(F.m());
  for (Index i : subset) {
    if (i < 0 || i >= F.n) throw validation_error("row_sums_subset: index out of range");
    s += F.cross.row(i).transpose();
  }
  return F.cross * (F.landmark_block_pinv * s);
}

}  // namespace nyk
