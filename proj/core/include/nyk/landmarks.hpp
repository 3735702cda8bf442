#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "nyk/proximity.hpp"

namespace nyk {

struct MEBSolution {
  std::vector<Index> core_set;  // indices into the class subset, aligned with dual_weights
  VectorXd dual_weights;        // on the simplex
  double radius = 0.0;
  double epsilon = 0.0;
};

struct LandmarkReport {
  std::vector<Index> indices;            // global, sorted, distinct
  std::map<int, Index> per_class_counts;  // filled by the MEB selector only
  std::string method;                    // "meb" | "kmeans" | "random"
  double smss = std::numeric_limits<double>::quiet_NaN();  // MEB selector only
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  Index m = 0;
  std::uint64_t seed = 0;
};

// Badoiu-Clarkson core-set loop over a psd kernel accessor on n class points.  Inner dual MEB
// solved by away-step Frank-Wolfe to relative gap 1e-9, warm-started as points join.  Start:
// a seeded random point plus the point farthest from it.  Core set = { i : alpha_i > 1e-8 }.
// A negative self-distance (indefinite kernel) raises numerical_error telling the caller to
// square the kernel first.
MEBSolution meb_coreset(const std::function<double(Index, Index)>& kernel, Index n,
                        double epsilon, std::uint64_t seed);

// Algorithm: per class, square the class block if indefinite (smallest eigenvalue below
// -1e-10 * max|lambda|), run meb_coreset, map to global indices, union/dedup/sort.
// Fills per_class_counts and the SMSS of the induced approximation.
LandmarkReport meb_landmarks(const MatrixXd& K, const std::vector<int>& labels,
                             double epsilon = 0.01, std::uint64_t seed = 0);

// Lloyd k-means on the rows of K (kernel k-means on the psd-squared kernel): uniform sample of
// m distinct rows as initial centroids, at most 50 iterations or assignment fixpoint, an empty
// cluster keeps its centroid; landmark = point nearest each centroid, dedup + sort.
LandmarkReport kmeans_landmarks(const MatrixXd& K, Index m, std::uint64_t seed);

// Same clustering on the factored row embedding E = cross (pinv(W) G^{1/2}) whose Gram matrix
// is the squared approximation -- never materializes N x N.
LandmarkReport kmeans_landmarks(const NystromFactors& F, Index m, std::uint64_t seed);

LandmarkReport random_landmarks(Index n, Index m, std::uint64_t seed);

// s(K^, K) = f(K^)/f(K) with f(S) = sum_y | E[S | both in y] - E[S | one in y, one not] |,
// self-pairs excluded.  f(K^) is evaluated through the factors in O(N m).
// f(K) = 0 raises numerical_error (degenerate margin).
double smss(const NystromFactors& approx, const MatrixXd& original,
            const std::vector<int>& labels);

// Dense f(S) used by smss and by tests (brute-force comparable).
double smss_f(const MatrixXd& S, const std::vector<int>& labels);

}  // namespace nyk
