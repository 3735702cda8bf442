#pragma once

#include "nyk/proximity.hpp"

namespace nyk {

// Eigenpairs of a factored symmetric matrix.  Columns of eigvecs are orthonormal; eigvals may
// be negative and are sorted by descending |lambda|.
struct LowRankEvd {
  MatrixXd eigvecs;  // N x r
  VectorXd eigvals;  // r
};

// Factored pseudo-inverse P = left * diag(inv_singvals) * right.
struct LowRankPinv {
  MatrixXd left;          // N x r
  VectorXd inv_singvals;  // r, reciprocals of the kept singular values
  MatrixXd right;         // r x N
};

// EVD of the psd matrix B B^T through the m x m Gram matrix B^T B.  Columns of B may be
// dependent; directions with Gram eigenvalue <= rel_tol * max are dropped.
LowRankEvd evd_from_factor(const MatrixXd& B, double rel_tol = 1e-12);

// Signed EVD of the Nystrom-reconstructed matrix in O(N m^2).  Route: eigendecompose the
// landmark block, form B = cross U |Lambda|^{-1/2}, orthonormalize through the Gram matrix,
// then diagonalize the projected operator C0^T K~ C0 so the returned columns are actual
// eigenvectors (the Gram basis alone mixes eigenspaces when K~ is indefinite).  Pairs with
// |lambda| <= 1e-10 * max|lambda| are dropped; result sorted by descending |lambda|.
LowRankEvd nystrom_evd(const NystromFactors& F);

// Factors representing K~ K~^T on the same landmark set: cross' = cross (pinv(W) G),
// block' = G with G = cross^T cross.  Exact for any input factors; always psd.
NystromFactors nystrom_square(const NystromFactors& F);

// Pseudo-inverse of K~ from its signed EVD: left = C, inv_singvals = 1/|lambda|,
// right = diag(sign lambda) C^T.  Singular values <= 1e-12 * sigma_max dropped.
LowRankPinv nystrom_pinv(const NystromFactors& F);

VectorXd pinv_apply(const LowRankPinv& P, const VectorXd& v);
MatrixXd pinv_apply(const LowRankPinv& P, const MatrixXd& V);

}  // namespace nyk
