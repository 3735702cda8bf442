#pragma once

#include <cstdint>
#include <string>

#include "nyk/classifiers.hpp"
#include "nyk/datasets.hpp"
#include "nyk/landmarks.hpp"

namespace nyk {

struct ExperimentSpec {
  std::string dataset;          // generator name, or "file"
  std::string kernel_path;      // NYK1/NYKB path when dataset == "file"
  std::string label_path;
  Index n = 200;                // generator size (n_per_class for ball)
  std::string classifier = "ny-ikfd";  // ikfd | ny-ikfd | pcvm | ny-pcvm
  std::string selector = "meb";        // meb | kmeans | random (Nystrom paths)
  double epsilon = 0.01;        // meb
  Index m = 10;                 // kmeans / random
  int folds = 10;
  std::uint64_t seed = 0;
  std::string output;           // report base path; empty = stdout only
  TrainConfig train;
};

struct CvReport {
  std::vector<double> fold_accuracy;  // percent
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> fold_seconds;
  double mean_landmarks = std::numeric_limits<double>::quiet_NaN();
  double mean_smss = std::numeric_limits<double>::quiet_NaN();
  double sparsity_percent = std::numeric_limits<double>::quiet_NaN();  // PCVM retained weights
  // Global dataset indices of each fold's landmarks (Nystrom paths); lets tests assert that
  // no test point ever leaks into its own fold's selection.
  std::vector<std::vector<Index>> fold_landmarks;
};

// Per-class shuffle then round-robin assignment; returns the k test-index sets.
std::vector<std::vector<Index>> stratified_folds(const std::vector<int>& labels, int k,
                                                 std::uint64_t seed);

// Stratified k-fold; landmarks selected on training indices only; test points mapped through
// nystrom_extend (direct kernel evaluation when vectorial, sub-matrix reads when precomputed).
// A fold whose training split loses a class raises validation_error suggesting fewer folds.
CvReport crossval(const LabeledDataset& data, const ExperimentSpec& spec);

// Resolves spec.dataset (generator or kernel/label files) and runs crossval.
CvReport crossval(const ExperimentSpec& spec);

struct ScalingRow {
  Index n = 0;
  double seconds = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // least-squares log-log slope
};

// gauss_overlap at each N; trains `classifier` ("ny-ikfd" with m random landmarks, or the
// dense "ikfd" oracle); median-of-3 wall time per N.  The Nystrom path never materializes
// an N x N matrix.
ScalingTable scaling_bench(const std::string& classifier, const std::vector<Index>& Ns,
                           Index m, std::uint64_t seed);

}  // namespace nyk
