#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nyk/classifiers.hpp"
#include "test_support.hpp"

using namespace nyk;

namespace {

struct Blobs {
  MatrixXd X;
  std::vector<int> y;
};

// two 2-D Gaussians at (+-cx, 0)
Blobs two_blobs(Index n_per_class, double cx, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  Blobs b;
  b.X.resize(2 * n_per_class, 2);
  for (Index i = 0; i < n_per_class; ++i) {
    b.X(i, 0) = cx + sd * N01(rng);
    b.X(i, 1) = sd * N01(rng);
    b.X(n_per_class + i, 0) = -cx + sd * N01(rng);
    b.X(n_per_class + i, 1) = sd * N01(rng);
    b.y.push_back(1);
  }
  for (Index i = 0; i < n_per_class; ++i) b.y.push_back(-1);
  return b;
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

// classical two-class Fisher discriminant in input space
std::vector<int> fisher_oracle_labels(const MatrixXd& X, const std::vector<int>& y) {
  Eigen::Vector2d mp = Eigen::Vector2d::Zero(), mn = Eigen::Vector2d::Zero();
  double np = 0.0, nn = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    if (y[static_cast<std::size_t>(i)] > 0) {
      mp += X.row(i).transpose();
      np += 1.0;
    } else {
      mn += X.row(i).transpose();
      nn += 1.0;
    }
  }
  mp /= np;
  mn /= nn;
  Eigen::Matrix2d Sw = Eigen::Matrix2d::Zero();
  for (Index i = 0; i < X.rows(); ++i) {
    const Eigen::Vector2d d =
        X.row(i).transpose() - (y[static_cast<std::size_t>(i)] > 0 ? mp : mn);
    Sw += d * d.transpose();
  }
  const Eigen::Vector2d w = Sw.ldlt().solve(mp - mn);
  const double b = -w.dot(mp + mn) / 2.0;
  std::vector<int> out;
  for (Index i = 0; i < X.rows(); ++i)
    out.push_back(X.row(i).dot(w) + b >= 0.0 ? 1 : -1);
  return out;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  Index hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (pred[i] == truth[i]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace

TEST_SUITE("classifiers") {

TEST_CASE("probit: exact half at zero, monotone, open unit range, symmetric") {
  CHECK(probit(0.0) == 0.5);  // exact, not approximate
  CHECK(probit(0.5) == doctest::Approx(0.6914624613).epsilon(1e-8));
  double prev = -1.0;
  for (double z = -40.0; z <= 40.0; z += 0.25) {
    const double p = probit(z);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(p >= prev);
    prev = p;
  }
  for (double z : {0.3, 1.7, 5.0, 12.0})
    CHECK(probit(-z) + probit(z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated-normal mean: bounded by z on the matching side, guarded deep in the tail") {
  for (double z = -30.0; z <= 0.0; z += 0.5) {
    const double h = pcvm_estep_mean(z, 1);
    CHECK(std::isfinite(h));
    CHECK(h >= z);          // adding a nonnegative Mills term
    CHECK(h >= -1e-12);     // E[t | t > 0] for the truncated prior
  }
  for (double z = 0.0; z <= 30.0; z += 0.5) {
    const double h = pcvm_estep_mean(z, -1);
    CHECK(std::isfinite(h));
    CHECK(h <= z);
    CHECK(h <= 1e-12);
  }
  // the truncated Mills series leaves a small seam at the guard threshold; it must stay small
  CHECK(std::abs(pcvm_estep_mean(-8.001, 1) - pcvm_estep_mean(-7.999, 1)) < 5e-3);
}

TEST_CASE("ikfd: separated Gaussians reach 99% and agree with an input-space Fisher oracle") {
  const Blobs b = two_blobs(100, 3.0, 0.5, 1);
  const MatrixXd K = b.X * b.X.transpose();
  const NystromFactors F = nystrom_factorize(K, all_indices(K.rows()));
  const IkfdModel M = train_ikfd(F, b.y);

  CHECK(M.posterior.var_pos > 0.0);
  CHECK(M.posterior.var_neg > 0.0);

  std::vector<int> pred;
  for (Index i = 0; i < K.rows(); ++i) {
    const IkfdPrediction p = predict_ikfd(M, K.row(i).transpose());
    CHECK(std::isfinite(p.score));
    pred.push_back(p.label);
  }
  CHECK(accuracy(pred, b.y) >= 0.99);
  CHECK(accuracy(pred, fisher_oracle_labels(b.X, b.y)) >= 0.99);
}

TEST_CASE("ikfd: factored training at exact rank matches the dense oracle scores") {
  const Blobs b = two_blobs(60, 3.0, 0.5, 2);
  const MatrixXd K = b.X * b.X.transpose();  // rank 2: any generic landmark set is exact
  const NystromFactors Fd = nystrom_factorize(K, all_indices(K.rows()));
  const NystromFactors Fn = nystrom_factorize(K, {0, 17, 35, 60, 77, 95, 110});
  const IkfdModel Md = train_ikfd(Fd, b.y);
  const IkfdModel Mn = train_ikfd(Fn, b.y);
  for (Index i = 0; i < K.rows(); ++i) {
    const IkfdPrediction pd = predict_ikfd(Md, K.row(i).transpose());
    const IkfdPrediction pn = predict_ikfd(Mn, K.row(i).transpose());
    CHECK(pn.label == pd.label);
    CHECK(std::abs(std::abs(pn.score) - std::abs(pd.score)) <=
          1e-6 * (1.0 + std::abs(pd.score)));
  }
}

TEST_CASE("ikfd: rescaling the kernel leaves predicted labels unchanged") {
  const Blobs b = two_blobs(50, 2.0, 0.8, 3);
  const MatrixXd K = b.X * b.X.transpose();
  const NystromFactors F1 = nystrom_factorize(K, all_indices(K.rows()));
  const IkfdModel M1 = train_ikfd(F1, b.y);
  for (double c : {0.1, 10.0}) {
    const MatrixXd Kc = c * K;
    const NystromFactors Fc = nystrom_factorize(Kc, all_indices(K.rows()));
    const IkfdModel Mc = train_ikfd(Fc, b.y);
    for (Index i = 0; i < K.rows(); ++i) {
      const int l1 = predict_ikfd(M1, K.row(i).transpose()).label;
      const int lc = predict_ikfd(Mc, Kc.row(i).transpose()).label;
      CHECK(lc == l1);
    }
  }
}

TEST_CASE("ikfd: degenerate and symmetric predictions") {
  IkfdModel M;
  M.alpha = VectorXd::Zero(5);
  M.bias = 0.0;
  const IkfdPrediction p = predict_ikfd(M, VectorXd::Ones(5));
  CHECK(p.score == 0.0);
  CHECK(p.label == 1);  // sign(0) = +1
  CHECK(p.posterior == doctest::Approx(0.5).epsilon(1e-12));

  // symmetric class projections: a zero-score point sits exactly between them
  IkfdModel S;
  S.alpha = VectorXd::Zero(3);
  S.posterior = {2.0, 0.7, -2.0, 0.7};
  CHECK(predict_ikfd(S, VectorXd::Zero(3)).posterior == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("ikfd: posterior of a point deep inside the positive class exceeds one half") {
  const Blobs b = two_blobs(40, 3.0, 0.5, 4);
  const MatrixXd K = b.X * b.X.transpose();
  const IkfdModel M = train_ikfd(nystrom_factorize(K, all_indices(K.rows())), b.y);
  CHECK(predict_ikfd(M, K.row(0).transpose()).posterior > 0.5);
}

TEST_CASE("ikfd: one-class input is rejected") {
  const MatrixXd K = MatrixXd::Identity(6, 6);
  const std::vector<int> y(6, 1);
  CHECK_THROWS_AS(train_ikfd(nystrom_factorize(K, all_indices(6)), y), validation_error);
}

TEST_CASE("pcvm: blob data with an rbf kernel is accurate and sparse") {
  const Blobs tr = two_blobs(60, 2.5, 0.8, 5);
  const Blobs te = two_blobs(40, 2.5, 0.8, 6);
  KernelFunction k;
  k.kind = KernelKind::rbf;
  k.sigma = 2.0;
  const MatrixXd K = kernel_matrix(k, tr.X);
  const PcvmModel M = train_pcvm_full(K, tr.y);

  CHECK(static_cast<double>(M.active.size()) < 0.2 * static_cast<double>(K.rows()));
  for (Index j = 0; j < M.weights.size(); ++j)
    CHECK(M.weights[j] > M.prune_threshold);  // magnitudes; the basis label carries the sign

  MatrixXd B(static_cast<Index>(M.active.size()), tr.X.cols());
  for (Index j = 0; j < B.rows(); ++j) B.row(j) = tr.X.row(M.active[static_cast<std::size_t>(j)]);
  const MatrixXd rows = kernel_cross(k, te.X, B);  // tests x active
  std::vector<int> pred;
  for (Index i = 0; i < rows.rows(); ++i)
    pred.push_back(predict_pcvm(M, rows.row(i).transpose()).label);
  CHECK(accuracy(pred, te.y) >= 0.95);
}

TEST_CASE("pcvm: sign constraint holds after every EM iteration and pruning never regrows") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Blobs b = two_blobs(60, 1.0, 1.0, seed);  // overlapping classes
    const MatrixXd K = b.X * b.X.transpose();
    PcvmTrace tr;
    train_pcvm_full(K, b.y, {}, &tr);
    REQUIRE(!tr.weights.empty());
    for (std::size_t t = 0; t < tr.weights.size(); ++t) {
      for (Index i = 0; i < K.rows(); ++i)
        CHECK(static_cast<double>(b.y[static_cast<std::size_t>(i)]) * tr.weights[t][i] >= 0.0);
      if (t > 0) {
        // active sets only shrink
        CHECK(tr.active[t].size() <= tr.active[t - 1].size());
        for (Index idx : tr.active[t])
          CHECK(std::find(tr.active[t - 1].begin(), tr.active[t - 1].end(), idx) !=
                tr.active[t - 1].end());
      }
    }
  }
}

TEST_CASE("ny-pcvm: full-rank factors track the dense EM for the first iterations") {
  const Blobs b = two_blobs(40, 2.0, 0.8, 7);  // N = 80 stays on the exact reduced update
  const MatrixXd K = b.X * b.X.transpose();
  const NystromFactors F = nystrom_factorize(K, all_indices(K.rows()));
  TrainConfig cfg;
  cfg.max_iters = 5;
  PcvmTrace td, tn;
  try {
    train_pcvm_full(K, b.y, cfg, &td);
  } catch (const numerical_error&) {
  }
  try {
    train_ny_pcvm(F, b.y, cfg, &tn);
  } catch (const numerical_error&) {
  }
  const std::size_t steps = std::min({std::size_t{3}, td.weights.size(), tn.weights.size()});
  REQUIRE(steps >= 1);
  for (std::size_t t = 0; t < steps; ++t)
    CHECK((td.weights[t] - tn.weights[t]).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("pcvm: total collapse reports the iteration it happened at") {
  const Blobs b = two_blobs(20, 2.0, 0.8, 8);
  const MatrixXd K = b.X * b.X.transpose();
  TrainConfig cfg;
  cfg.prune_threshold = 1e9;
  CHECK_THROWS_AS(train_pcvm_full(K, b.y, cfg), numerical_error);
  try {
    train_pcvm_full(K, b.y, cfg);
  } catch (const numerical_error& e) {
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
}

TEST_CASE("pcvm: one-class input is rejected") {
  const MatrixXd K = MatrixXd::Identity(6, 6);
  CHECK_THROWS_AS(train_pcvm_full(K, std::vector<int>(6, -1)), validation_error);
}

TEST_CASE("pcvm prediction: worked example and the empty model") {
  PcvmModel M;
  M.weights = VectorXd(2);
  M.weights << 1.0, 0.5;
  M.active = {0, 1};
  M.basis_labels = {1, -1};
  M.bias = 0.0;
  VectorXd row = VectorXd::Ones(2);
  const PcvmPrediction p = predict_pcvm(M, row);  // score 1*1 - 0.5*1 = 0.5
  CHECK(p.probability == doctest::Approx(0.6914624613).epsilon(1e-6));
  CHECK(p.label == 1);

  PcvmModel empty;  // everything pruned upstream, bias 0
  const PcvmPrediction q = predict_pcvm(empty, VectorXd());
  CHECK(q.probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q.label == 1);
}

TEST_CASE("binary_view maps the chosen class to +1 and the rest to -1") {
  CHECK(binary_view({0, 1, 2, 1}, 1) == std::vector<int>{-1, 1, -1, 1});
  CHECK(binary_view({0, 1, 2, 1}, 0) == std::vector<int>{1, -1, -1, -1});
}

TEST_CASE("one-vs-rest: two classes reproduce the plain binary decision") {
  const Blobs b = two_blobs(50, 2.0, 0.8, 9);
  const MatrixXd K = b.X * b.X.transpose();
  const NystromFactors F = nystrom_factorize(K, all_indices(K.rows()));

  // pcvm: probability is monotone in the score, and the rest-model mirrors exactly
  const PcvmModel plain_p = train_pcvm_full(K, b.y);
  const auto ovr_p = one_vs_rest_train<PcvmModel>(
      b.y, [&](const std::vector<int>& bv) { return train_pcvm_full(K, bv); });
  REQUIRE(ovr_p.classes == std::vector<int>{-1, 1});
  auto active_row = [&](const PcvmModel& m, Index i) {
    VectorXd r(static_cast<Index>(m.active.size()));
    for (Index j = 0; j < r.size(); ++j) r[j] = K(i, m.active[static_cast<std::size_t>(j)]);
    return r;
  };
  for (Index i = 0; i < K.rows(); ++i) {
    const auto [label, scores] = one_vs_rest_predict(ovr_p, [&](const PcvmModel& m, int) {
      return predict_pcvm(m, active_row(m, i)).probability;
    });
    CHECK(label == predict_pcvm(plain_p, active_row(plain_p, i)).label);
    CHECK(scores.size() == 2);
  }

  // ikfd: the rest model is the exact mirror, so argmax-posterior equals the plain
  // posterior thresholded at one half
  const IkfdModel plain_k = train_ikfd(F, b.y);
  const auto ovr_k = one_vs_rest_train<IkfdModel>(
      b.y, [&](const std::vector<int>& bv) { return train_ikfd(F, bv); });
  for (Index i = 0; i < K.rows(); ++i) {
    const VectorXd row = K.row(i).transpose();
    const int label = one_vs_rest_predict(ovr_k, [&](const IkfdModel& m, int) {
                        return predict_ikfd(m, row).posterior;
                      }).first;
    CHECK(label == (predict_ikfd(plain_k, row).posterior >= 0.5 ? 1 : -1));
  }
}

TEST_CASE("one-vs-rest: three separated Gaussians classified above 95%") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> N01(0.0, 0.6);
  const double cx[3] = {0.0, 6.0, -6.0};
  MatrixXd X(120, 2);
  std::vector<int> y;
  for (Index i = 0; i < 120; ++i) {
    X(i, 0) = cx[i / 40] + N01(rng);
    X(i, 1) = N01(rng);
    y.push_back(static_cast<int>(i / 40));
  }
  const MatrixXd K = X * X.transpose();
  const NystromFactors F = nystrom_factorize(K, all_indices(120));
  const auto ovr = one_vs_rest_train<IkfdModel>(
      y, [&](const std::vector<int>& bv) { return train_ikfd(F, bv); });
  std::vector<int> pred;
  for (Index i = 0; i < 120; ++i) {
    const VectorXd row = K.row(i).transpose();
    pred.push_back(one_vs_rest_predict(ovr, [&](const IkfdModel& m, int) {
                     return predict_ikfd(m, row).posterior;
                   }).first);
  }
  CHECK(accuracy(pred, y) >= 0.95);
}

TEST_CASE("one-vs-rest: equal scores resolve to the lowest class id") {
  OneVsRestModel<int> ovr;
  ovr.classes = {0, 1, 2};
  ovr.models = {0, 0, 0};
  const auto [label, scores] = one_vs_rest_predict(ovr, [](const int&, int) { return 0.7; });
  CHECK(label == 0);
  CHECK(scores == std::vector<double>(3, 0.7));
}

}  // TEST_SUITE
