#include "nyk/crossval.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "nyk/io.hpp"

namespace nyk {

std::vector<std::vector<Index>> stratified_folds(const std::vector<int>& labels, int k,
                                                 std::uint64_t seed) {
  if (k < 2) throw validation_error("stratified_folds: need at least 2 folds");
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
  // the fold cursor runs on across classes so leftovers spread over different folds;
  // fold sizes stay within 1 overall, not just per class (and folds = n is true LOO)
  std::size_t cursor = 0;
  for (int c : classes) {
    std::vector<Index> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) idx.push_back(static_cast<Index>(i));
    for (std::size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
    for (Index i : idx) folds[cursor++ % static_cast<std::size_t>(k)].push_back(i);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

namespace {

std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(fold + 1));
}

struct FoldOutcome {
  double accuracy = 0.0;
  double landmarks = std::numeric_limits<double>::quiet_NaN();
  double smss_val = std::numeric_limits<double>::quiet_NaN();
  double sparsity = std::numeric_limits<double>::quiet_NaN();
};

// One binary training problem on the fold's training kernel; returns test scores aligned with
// te.  For Nystrom classifiers the test rows go through nystrom_extend.
struct BinaryRun {
  std::vector<double> decision;  // posterior (ikfd) or probability (pcvm) for class +1
  std::vector<int> label;
  double sparsity = std::numeric_limits<double>::quiet_NaN();
};

BinaryRun run_binary(const std::string& classifier, const MatrixXd& Ktr,
                     const NystromFactors* F, const std::vector<int>& ytr,
                     const MatrixXd& te_rows_tr, const MatrixXd& te_rows_lm,
                     const TrainConfig& cfg) {
  BinaryRun out;
  const Index nte = te_rows_tr.rows() > 0 ? te_rows_tr.rows() : te_rows_lm.rows();
  out.decision.resize(static_cast<std::size_t>(nte));
  out.label.resize(static_cast<std::size_t>(nte));

  if (classifier == "ikfd" || classifier == "ny-ikfd") {
    NystromFactors full;
    if (classifier == "ikfd") {
      std::vector<Index> all(static_cast<std::size_t>(Ktr.rows()));
      std::iota(all.begin(), all.end(), Index{0});
      full = nystrom_factorize(Ktr, all);
    }
    const NystromFactors& use = (classifier == "ikfd") ? full : *F;
    const IkfdModel M = train_ikfd(use, ytr);
    for (Index i = 0; i < nte; ++i) {
      VectorXd row;
      if (classifier == "ikfd") row = te_rows_tr.row(i).transpose();
      else row = nystrom_extend(use, te_rows_lm.row(i).transpose());
      const IkfdPrediction p = predict_ikfd(M, row);
      out.decision[static_cast<std::size_t>(i)] = p.posterior;
      out.label[static_cast<std::size_t>(i)] = p.label;
    }
    return out;
  }

  if (classifier == "pcvm" || classifier == "ny-pcvm") {
    PcvmModel M;
    if (classifier == "pcvm") M = train_pcvm_full(Ktr, ytr, cfg);
    else M = train_ny_pcvm(*F, ytr, cfg);
    out.sparsity = 100.0 * static_cast<double>(M.active.size()) / static_cast<double>(ytr.size());
    for (Index i = 0; i < nte; ++i) {
      VectorXd row_active(static_cast<Index>(M.active.size()));
      if (classifier == "pcvm") {
        for (std::size_t j = 0; j < M.active.size(); ++j)
          row_active[static_cast<Index>(j)] = te_rows_tr(i, M.active[j]);
      } else {
        const VectorXd ext = nystrom_extend(*F, te_rows_lm.row(i).transpose());
        for (std::size_t j = 0; j < M.active.size(); ++j)
          row_active[static_cast<Index>(j)] = ext[M.active[j]];
      }
      const PcvmPrediction p = predict_pcvm(M, row_active);
      out.decision[static_cast<std::size_t>(i)] = p.probability;
      out.label[static_cast<std::size_t>(i)] = p.label;
    }
    return out;
  }

  throw validation_error("unknown classifier: " + classifier);
}

}  // namespace

CvReport crossval(const LabeledDataset& data, const ExperimentSpec& spec) {
  const Index n = data.n();
  if (n < 2) throw validation_error("crossval: empty dataset");
  if (spec.folds < 2) throw validation_error("crossval: folds must be at least 2");
  if (static_cast<Index>(spec.folds) > n)
    throw validation_error("crossval: more folds than points");

  const bool nystrom = spec.classifier == "ny-ikfd" || spec.classifier == "ny-pcvm";
  std::vector<int> classes(data.labels.begin(), data.labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw validation_error("crossval: need at least two classes");
  const bool plain_binary = classes.size() == 2 && classes[0] == -1 && classes[1] == 1;

  const auto folds = stratified_folds(data.labels, spec.folds, spec.seed);
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});

  CvReport rep;
  double lm_sum = 0.0, smss_sum = 0.0, sp_sum = 0.0;
  int lm_cnt = 0, smss_cnt = 0, sp_cnt = 0;

  for (int f = 0; f < spec.folds; ++f) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Index>& te = folds[static_cast<std::size_t>(f)];
    std::vector<Index> tr;
    tr.reserve(static_cast<std::size_t>(n) - te.size());
    std::set_difference(all.begin(), all.end(), te.begin(), te.end(), std::back_inserter(tr));

    std::vector<int> ytr;
    ytr.reserve(tr.size());
    for (Index i : tr) ytr.push_back(data.labels[static_cast<std::size_t>(i)]);
    {
      std::vector<int> tc(ytr);
      std::sort(tc.begin(), tc.end());
      tc.erase(std::unique(tc.begin(), tc.end()), tc.end());
      if (tc.size() != classes.size())
        throw validation_error("crossval: a training fold lost a class; use fewer folds");
    }

    const MatrixXd Ktr = dataset_kernel_block(data, tr, tr);

    // landmark selection on training indices only
    NystromFactors F;
    std::vector<Index> lm_local;
    if (nystrom) {
      LandmarkReport sel;
      if (spec.selector == "meb") sel = meb_landmarks(Ktr, ytr, spec.epsilon, fold_seed(spec.seed, f));
      else if (spec.selector == "kmeans") sel = kmeans_landmarks(Ktr, spec.m, fold_seed(spec.seed, f));
      else if (spec.selector == "random")
        sel = random_landmarks(static_cast<Index>(tr.size()), spec.m, fold_seed(spec.seed, f));
      else throw validation_error("unknown selector: " + spec.selector);
      lm_local = sel.indices;
      F = nystrom_factorize(Ktr, lm_local);
      lm_sum += static_cast<double>(lm_local.size());
      ++lm_cnt;
      smss_sum += smss(F, Ktr, ytr);
      ++smss_cnt;
    }

    // test-point kernel rows: against all training points (dense) or landmarks (Nystrom)
    MatrixXd te_rows_tr, te_rows_lm;
    if (nystrom) {
      std::vector<Index> lm_global;
      lm_global.reserve(lm_local.size());
      for (Index j : lm_local) lm_global.push_back(tr[static_cast<std::size_t>(j)]);
      rep.fold_landmarks.push_back(lm_global);
      te_rows_lm = dataset_kernel_block(data, te, lm_global);
    } else {
      te_rows_tr = dataset_kernel_block(data, te, tr);
    }

    // train / predict (one-vs-rest when labels are not already +/-1 binary)
    std::vector<int> predicted(te.size());
    double sparsity = std::numeric_limits<double>::quiet_NaN();
    if (plain_binary) {
      const BinaryRun r = run_binary(spec.classifier, Ktr, nystrom ? &F : nullptr, ytr,
                                     te_rows_tr, te_rows_lm, spec.train);
      predicted = r.label;
      sparsity = r.sparsity;
    } else {
      std::vector<std::vector<double>> class_scores;
      double sp_acc = 0.0;
      int sp_n = 0;
      for (int c : classes) {
        const BinaryRun r = run_binary(spec.classifier, Ktr, nystrom ? &F : nullptr,
                                       binary_view(ytr, c), te_rows_tr, te_rows_lm, spec.train);
        class_scores.push_back(r.decision);
        if (!std::isnan(r.sparsity)) {
          sp_acc += r.sparsity;
          ++sp_n;
        }
      }
      for (std::size_t i = 0; i < te.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < classes.size(); ++c)
          if (class_scores[c][i] > class_scores[best][i]) best = c;
        predicted[i] = classes[best];
      }
      if (sp_n > 0) sparsity = sp_acc / sp_n;
    }
    if (!std::isnan(sparsity)) {
      sp_sum += sparsity;
      ++sp_cnt;
    }

    int correct = 0;
    for (std::size_t i = 0; i < te.size(); ++i)
      if (predicted[i] == data.labels[static_cast<std::size_t>(te[i])]) ++correct;
    rep.fold_accuracy.push_back(100.0 * correct / static_cast<double>(te.size()));
    rep.fold_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  const double k = static_cast<double>(rep.fold_accuracy.size());
  rep.mean_accuracy =
      std::accumulate(rep.fold_accuracy.begin(), rep.fold_accuracy.end(), 0.0) / k;
  double var = 0.0;
  for (double a : rep.fold_accuracy) var += (a - rep.mean_accuracy) * (a - rep.mean_accuracy);
  rep.std_accuracy = std::sqrt(var / k);
  if (lm_cnt > 0) rep.mean_landmarks = lm_sum / lm_cnt;
  if (smss_cnt > 0) rep.mean_smss = smss_sum / smss_cnt;
  if (sp_cnt > 0) rep.sparsity_percent = sp_sum / sp_cnt;
  return rep;
}

CvReport crossval(const ExperimentSpec& spec) {
  LabeledDataset d;
  if (spec.dataset == "ball") d = gen_ball(spec.n, spec.seed);
  else if (spec.dataset == "checkerboard") d = gen_checkerboard(spec.n, spec.seed);
  else if (spec.dataset == "gauss_overlap") d = gen_gauss_overlap(spec.n, spec.seed);
  else if (spec.dataset == "pe_gaussians") d = gen_pe_gaussians(spec.n, spec.seed);
  else if (spec.dataset == "magnification") d = gen_magnification(spec.seed);
  else if (spec.dataset == "file") {
    if (spec.kernel_path.empty() || spec.label_path.empty())
      throw validation_error("crossval: file dataset needs kernel and label paths");
    d.K = read_kernel_file(spec.kernel_path);
    d.labels = read_labels(spec.label_path);
    if (static_cast<Index>(d.labels.size()) != d.K.rows())
      throw validation_error("crossval: label count does not match kernel size");
  } else {
    throw validation_error("unknown dataset: " + spec.dataset);
  }
  return crossval(d, spec);
}

ScalingTable scaling_bench(const std::string& classifier, const std::vector<Index>& Ns,
                           Index m, std::uint64_t seed) {
  for (std::size_t i = 1; i < Ns.size(); ++i)
    if (Ns[i] <= Ns[i - 1]) throw validation_error("scaling_bench: N list must be ascending");
  if (classifier != "ikfd" && classifier != "ny-ikfd")
    throw validation_error("scaling_bench: classifier must be ikfd or ny-ikfd");

  ScalingTable table;
  for (Index N : Ns) {
    const LabeledDataset d = gen_gauss_overlap(N, seed);
    MatrixXd K;  // dense oracle only; the Nystrom path never materializes N x N
    if (classifier == "ikfd") K = dataset_kernel(d);
    std::vector<double> times;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      if (classifier == "ikfd") {
        std::vector<Index> all(static_cast<std::size_t>(N));
        std::iota(all.begin(), all.end(), Index{0});
        const NystromFactors F = nystrom_factorize(K, all);
        (void)train_ikfd(F, d.labels);
      } else {
        const LandmarkReport lr = random_landmarks(N, m, seed + static_cast<std::uint64_t>(rep));
        const NystromFactors F = nystrom_factorize(d.kernel, d.X, lr.indices);
        (void)train_ikfd(F, d.labels);
      }
      times.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(times.begin(), times.end());
    table.rows.push_back({N, times[1]});  // median of 3
  }

  // least-squares slope on (ln N, ln t)
  const std::size_t k = table.rows.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : table.rows) {
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(std::max(r.seconds, 1e-12));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  table.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return table;
}

}  // namespace nyk
