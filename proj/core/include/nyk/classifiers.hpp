#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>

#include "nyk/lowrank.hpp"

namespace nyk {

struct TrainConfig {
  int max_iters = 500;
  double prune_threshold = 1e-4;
  double meb_epsilon = 0.01;
  double upsilon_landmark_fraction = 0.01;
  int upsilon_landmark_cap = 500;
  int small_problem_cutoff = 100;     // below this, Ny-PCVM switches to the dense reduced update
  int pcvm_dense_cutoff = 3000;       // train_pcvm_full refuses larger N
  std::uint64_t rng_seed = 0;
};

struct GaussianPosterior {
  double mean_pos = 0.0, var_pos = 1.0;
  double mean_neg = 0.0, var_neg = 1.0;
};

struct IkfdModel {
  VectorXd alpha;     // expansion coefficients over the N training points
  double bias = 0.0;
  VectorXd mean_pos;  // mu+ in kernel-expansion coordinates (N)
  VectorXd mean_neg;
  GaussianPosterior posterior;  // 1-D Gaussians of classwise training projections
};

struct IkfdPrediction {
  double score = 0.0;
  int label = 1;          // sign(score), sign(0) = +1
  double posterior = 0.5; // p(y=+1 | score), equal priors
};

// Fisher discriminant on the factored kernel.  Classwise means from factored row sums, the
// within-class operator assembled as an N x r factor (never N x N), alpha through the
// pseudo-inverted factored EVD, b = -alpha^T (mu+ + mu-)/2.  The dense oracle is the same
// routine with every point a landmark.
IkfdModel train_ikfd(const NystromFactors& F, const std::vector<int>& labels);

// kernel_row holds k(x, x_i) over the N training points (exact, or via nystrom_extend).
IkfdPrediction predict_ikfd(const IkfdModel& M, const VectorXd& kernel_row);

struct PcvmModel {
  VectorXd weights;             // aligned with `active`; w_i > prune_threshold, the basis label
                                // carries the sign: the plain-kernel coefficient is y_i w_i
  double bias = 0.0;
  std::vector<Index> active;    // surviving basis indices into the training set
  std::vector<int> basis_labels;
  double prune_threshold = 1e-4;
};

struct PcvmPrediction {
  double probability = 0.5;  // p(y=+1 | x) through the probit link
  int label = 1;             // +1 iff probability >= 0.5
};

// Per-iteration EM state (recorded after pruning), for lockstep comparisons and for checking
// the sign-constraint / pruning-monotonicity invariants from outside.
struct PcvmTrace {
  std::vector<VectorXd> weights;           // full N-length plain-kernel coefficients c = y o w
                                           // per iteration; y_i c_i >= 0 after every prune
  std::vector<std::vector<Index>> active;  // active indices per iteration
  std::vector<double> bias;
};

// Probit EM on the dense kernel: E-step truncated-normal mean, M-step damped normal equations
// on the active basis, bias update through its own latent scale t = sqrt(2|b|) (a fixed point
// at b = 0, applied literally), then sign-violator zeroing and magnitude pruning.
PcvmModel train_pcvm_full(const MatrixXd& K, const std::vector<int>& labels,
                          const TrainConfig& cfg = {}, PcvmTrace* trace = nullptr);

// Same EM with every product routed through K1 = cross and K2 = pinv(W) cross^T; the M-step
// inverse uses a Nystrom pseudo-inverse of the Upsilon matrix on m* = max(2, min(cap,
// ceil(fraction |active|))) per-iteration resampled active indices, falling back to the dense
// reduced update when |active| < small_problem_cutoff.
PcvmModel train_ny_pcvm(const NystromFactors& F, const std::vector<int>& labels,
                        const TrainConfig& cfg = {}, PcvmTrace* trace = nullptr);

// kernel_row_active holds k(x, x_i) over the active bases only.
PcvmPrediction predict_pcvm(const PcvmModel& M, const VectorXd& kernel_row_active);

// Standard normal CDF (the probit link Psi); Psi(0) = 0.5 exactly.
double probit(double z);

// E-step truncated-normal mean: z + y * pdf(z)/cdf(y z), Mills-ratio guarded for y z < -8.
// For y = +1 and z <= 0 the result never falls below z (and symmetrically for y = -1).
double pcvm_estep_mean(double z, int y);

// --- one-vs-rest ------------------------------------------------------------------------------

template <class Model>
struct OneVsRestModel {
  std::vector<int> classes;   // ascending; prediction ties resolve to the first (lowest id)
  std::vector<Model> models;  // one per class, that class mapped to +1
};

std::vector<int> binary_view(const std::vector<int>& labels, int positive_class);

// trainer: (const std::vector<int>& binary_labels) -> Model
template <class Model, class Trainer>
OneVsRestModel<Model> one_vs_rest_train(const std::vector<int>& labels, Trainer&& trainer) {
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw validation_error("one_vs_rest_train: need at least two classes");
  OneVsRestModel<Model> ovr;
  ovr.classes = classes;
  ovr.models.reserve(classes.size());
  for (int c : classes) {
    try {
      ovr.models.push_back(trainer(binary_view(labels, c)));
    } catch (const std::exception& e) {
      throw numerical_error("one_vs_rest_train: class " + std::to_string(c) + ": " + e.what());
    }
  }
  return ovr;
}

// scorer: (const Model&, int class_position) -> posterior/probability for that class.
// Returns (label, per-class scores); argmax with ties to the lowest class id.
template <class Model, class Scorer>
std::pair<int, std::vector<double>> one_vs_rest_predict(const OneVsRestModel<Model>& ovr,
                                                        Scorer&& scorer) {
  std::vector<double> scores(ovr.classes.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < ovr.classes.size(); ++i) {
    scores[i] = scorer(ovr.models[i], static_cast<int>(i));
    if (scores[i] > scores[best]) best = i;
  }
  return {ovr.classes[best], scores};
}

}  // namespace nyk
