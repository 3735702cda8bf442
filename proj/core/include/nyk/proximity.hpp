#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nyk/errors.hpp"

namespace nyk {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// --- similarity / dissimilarity conversions -------------------------------------------------

// Throws validation_error (reporting the max asymmetry) unless
// |K(i,j) - K(j,i)| <= tol * max(1, max|K|) for all i, j.
void require_symmetric(const MatrixXd& K, double tol = 1e-10);

// D(i,j) = K(i,i) + K(j,j) - 2 K(i,j).  D holds SQUARED dissimilarities; diagonal exactly zero.
MatrixXd sim_to_dissim(const MatrixXd& K, double symmetry_tol = 1e-10);

// S = -J D J / 2 with J = I - 11^T/N.  Rejects a nonzero diagonal.  Row sums of S vanish.
MatrixXd double_center(const MatrixXd& D);

struct Signature {
  Index p = 0;  // positive eigenvalues kept
  Index q = 0;  // negative eigenvalues kept
  Index z = 0;  // dropped (|lambda| <= zero_tol * max|lambda|)
};

struct PeEmbedding {
  MatrixXd V;        // N x (p+q), columns ordered positive block then negative block
  Signature sig;
  VectorXd eigvals;  // kept eigenvalues, same column order as V
};

// V = U |Lambda|^{1/2} on the kept spectrum; V * J_pq * V^T reconstructs S.
PeEmbedding pe_embedding(const MatrixXd& S, double zero_tol = 1e-12);

// --- kernel functions ------------------------------------------------------------------------

enum class KernelKind { linear, rbf, neg_manhattan, tanh_sigmoid, elm_arcsine, pe_signature };

// Closed-form kernels on row vectors.  rbf/elm take sigma; tanh takes scale and offset.
// pe_signature is the indefinite 2-D inner product x0*y0 - x1*y1.
struct KernelFunction {
  KernelKind kind = KernelKind::linear;
  double sigma = 1.0;
  double scale = 1.0;
  double offset = 0.0;

  double operator()(const Eigen::Ref<const VectorXd>& a,
                    const Eigen::Ref<const VectorXd>& b) const;
};

// Full kernel matrix of the rows of X (symmetric by construction).
MatrixXd kernel_matrix(const KernelFunction& k, const MatrixXd& X);

// Rectangular block k(A_i, B_j).
MatrixXd kernel_cross(const KernelFunction& k, const MatrixXd& A, const MatrixXd& B);

// --- Nystrom factorization -------------------------------------------------------------------

// cross = K_{N,m}, landmark_block = K_{m,m}; the landmark rows of `cross` equal
// `landmark_block` exactly (submatrix invariant).  `nystrom_square` produces factors in the
// representational sense cross * pinv(block) * cross^T only.
struct NystromFactors {
  Index n = 0;
  std::vector<Index> landmarks;  // sorted ascending, distinct
  MatrixXd cross;                // N x m
  MatrixXd landmark_block;       // m x m, symmetric
  MatrixXd landmark_block_pinv;  // Moore-Penrose, singular values < 1e-12 * sigma_max zeroed

  Index m() const { return static_cast<Index>(landmarks.size()); }
};

// Symmetric Moore-Penrose pseudo-inverse; eigenvalues with |lambda| <= rel_tol * max zeroed.
MatrixXd sym_pinv(const MatrixXd& A, double rel_tol = 1e-12);

NystromFactors nystrom_factorize(const MatrixXd& K, std::vector<Index> landmarks);
NystromFactors nystrom_factorize(const KernelFunction& k, const MatrixXd& X,
                                 std::vector<Index> landmarks);

// cross * pinv(block) * cross^T.  Tests / small N only.
MatrixXd nystrom_reconstruct(const NystromFactors& F);

// Approximated kernel row of a test point against all N training points, from its m
// landmark evaluations: cross * pinv(block) * k_new.
VectorXd nystrom_extend(const NystromFactors& F, const VectorXd& k_new);

// Row sums of the reconstructed matrix without materializing it: ((1^T cross) pinv) cross^T.
VectorXd row_sums(const NystromFactors& F);

// Same, but summing only over the columns listed in `subset` (classwise row sums).
VectorXd row_sums_subset(const NystromFactors& F, const std::vector<Index>& subset);

}  // namespace nyk
