#include "nyk/lowrank.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace nyk {

namespace {

// Sort eigenpairs by descending |lambda| in place.
void sort_by_abs(LowRankEvd& e) {
  const Index r = e.eigvals.size();
  std::vector<Index> ord(r);
  std::iota(ord.begin(), ord.end(), Index{0});
  std::sort(ord.begin(), ord.end(),
            [&](Index a, Index b) { return std::abs(e.eigvals[a]) > std::abs(e.eigvals[b]); });
  MatrixXd V(e.eigvecs.rows(), r);
  VectorXd lam(r);
  for (Index c = 0; c < r; ++c) {
    V.col(c) = e.eigvecs.col(ord[c]);
    lam[c] = e.eigvals[ord[c]];
  }
  e.eigvecs = std::move(V);
  e.eigvals = std::move(lam);
}

}  // namespace

LowRankEvd evd_from_factor(const MatrixXd& B, double rel_tol) {
  LowRankEvd out;
  if (B.cols() == 0 || B.norm() == 0.0) {
    out.eigvecs.resize(B.rows(), 0);
    out.eigvals.resize(0);
    return out;
  }
  const MatrixXd G = B.transpose() * B;  // m x m Gram
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw numerical_error("evd_from_factor: eigensolver failed");
  const VectorXd lam = es.eigenvalues();
  const double amax = lam.cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam[i] > rel_tol * amax) keep.push_back(i);
  out.eigvecs.resize(B.rows(), static_cast<Index>(keep.size()));
  out.eigvals.resize(static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Index i = keep[c];
    out.eigvecs.col(static_cast<Index>(c)) = B * (es.eigenvectors().col(i) / std::sqrt(lam[i]));
    out.eigvals[static_cast<Index>(c)] = lam[i];
  }
  sort_by_abs(out);
  return out;
}

LowRankEvd nystrom_evd(const NystromFactors& F) {
  LowRankEvd out;
  const Index m = F.m();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(F.landmark_block);
  if (es.info() != Eigen::Success) throw numerical_error("nystrom_evd: eigensolver failed");
  const VectorXd lam = es.eigenvalues();
  const double amax = lam.cwiseAbs().maxCoeff();
  if (amax == 0.0) {  // all-zero landmark block -> empty decomposition
    out.eigvecs.resize(F.n, 0);
    out.eigvals.resize(0);
    return out;
  }

  std::vector<Index> keep;
  for (Index i = 0; i < m; ++i)
    if (std::abs(lam[i]) > 1e-12 * amax) keep.push_back(i);
  const Index mk = static_cast<Index>(keep.size());

  // B = cross U |Lambda|^{-1/2}; the signed pseudo-inverse W+ rides along for the rotation.
  MatrixXd B(F.n, mk);
  MatrixXd Uk(m, mk);
  VectorXd inv_lam(mk);
  for (Index c = 0; c < mk; ++c) {
    const Index i = keep[c];
    Uk.col(c) = es.eigenvectors().col(i);
    B.col(c) = F.cross * (Uk.col(c) / std::sqrt(std::abs(lam[i])));
    inv_lam[c] = 1.0 / lam[i];
  }

  // Orthonormal basis of col(B) through the Gram route.
  const LowRankEvd basis = evd_from_factor(B);
  const MatrixXd& C0 = basis.eigvecs;
  if (C0.cols() == 0) {
    out.eigvecs.resize(F.n, 0);
    out.eigvals.resize(0);
    return out;
  }

  // Projected operator S = C0^T K~ C0 (r x r).  For indefinite K~ the Gram basis mixes
  // positive and negative eigenspaces, so diagonalize S and rotate.
  const MatrixXd P = F.cross.transpose() * C0;                       // m x r
  const MatrixXd S = P.transpose() * (Uk * inv_lam.asDiagonal() * Uk.transpose()) * P;
  Eigen::SelfAdjointEigenSolver<MatrixXd> rs(0.5 * (S + S.transpose()));
  if (rs.info() != Eigen::Success) throw numerical_error("nystrom_evd: rotation failed");

  const VectorXd a = rs.eigenvalues();
  const double rmax = a.cwiseAbs().maxCoeff();
  std::vector<Index> keep2;
  for (Index i = 0; i < a.size(); ++i)
    if (std::abs(a[i]) > 1e-10 * rmax) keep2.push_back(i);

  out.eigvecs.resize(F.n, static_cast<Index>(keep2.size()));
  out.eigvals.resize(static_cast<Index>(keep2.size()));
  for (std::size_t c = 0; c < keep2.size(); ++c) {
    out.eigvecs.col(static_cast<Index>(c)) = C0 * rs.eigenvectors().col(keep2[c]);
    out.eigvals[static_cast<Index>(c)] = a[keep2[c]];
  }
  sort_by_abs(out);
  return out;
}

NystromFactors nystrom_square(const NystromFactors& F) {
  NystromFactors S;
  S.n = F.n;
  S.landmarks = F.landmarks;
  MatrixXd G = F.cross.transpose() * F.cross;
  G = 0.5 * (G + G.transpose().eval());
  S.cross = F.cross * (F.landmark_block_pinv * G);
  S.landmark_block = G;
  S.landmark_block_pinv = sym_pinv(G);
  return S;
}

LowRankPinv nystrom_pinv(const NystromFactors& F) {
  const LowRankEvd e = nystrom_evd(F);
  LowRankPinv P;
  if (e.eigvals.size() == 0) {  // zero matrix -> rank-0 pinv
    P.left.resize(F.n, 0);
    P.inv_singvals.resize(0);
    P.right.resize(0, F.n);
    return P;
  }
  const double smax = e.eigvals.cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index i = 0; i < e.eigvals.size(); ++i)
    if (std::abs(e.eigvals[i]) > 1e-12 * smax) keep.push_back(i);
  const Index r = static_cast<Index>(keep.size());
  P.left.resize(F.n, r);
  P.inv_singvals.resize(r);
  P.right.resize(r, F.n);
  for (Index c = 0; c < r; ++c) {
    const Index i = keep[c];
    P.left.col(c) = e.eigvecs.col(i);
    P.inv_singvals[c] = 1.0 / std::abs(e.eigvals[i]);
    P.right.row(c) = (e.eigvals[i] >= 0 ? 1.0 : -1.0) * e.eigvecs.col(i).transpose();
  }
  return P;
}

VectorXd pinv_apply(const LowRankPinv& P, const VectorXd& v) {
  if (v.size() != P.right.cols())
    throw validation_error("pinv_apply: vector length mismatch");
  return P.left * (P.inv_singvals.asDiagonal() * (P.right * v));
}

MatrixXd pinv_apply(const LowRankPinv& P, const MatrixXd& V) {
  if (V.rows() != P.right.cols())
    throw validation_error("pinv_apply: row-count mismatch");
  return P.left * (P.inv_singvals.asDiagonal() * (P.right * V));
}

}  // namespace nyk
