#include "nyk/landmarks.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "nyk/lowrank.hpp"

namespace nyk {

namespace {

// Away-step Frank-Wolfe for  max_alpha  sum_i alpha_i k_ii - alpha^T K alpha  on the simplex.
// K is the kernel restricted to the current working set.  Relative duality gap 1e-9.
void solve_dual_meb(const MatrixXd& K, VectorXd& alpha) {
  const Index s = K.rows();
  if (s == 1) {
    alpha = VectorXd::Ones(1);
    return;
  }
  const VectorXd diag = K.diagonal();
  const double scale = std::max(1.0, diag.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  VectorXd Ka = K * alpha;
  for (int it = 0; it < 100000; ++it) {
    const VectorXd g = diag - 2.0 * Ka;  // gradient of the dual objective
    Index fw = 0, aw = -1;
    g.maxCoeff(&fw);
    double aw_val = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < s; ++i)
      if (alpha[i] > 0.0 && g[i] < aw_val) {
        aw_val = g[i];
        aw = i;
      }
    const double ga = g.dot(alpha);
    const double fw_gap = g[fw] - ga;
    if (fw_gap <= tol) break;

    const bool away = aw >= 0 && (ga - g[aw]) > fw_gap && alpha[aw] < 1.0;
    VectorXd d;
    double gmax;
    if (away) {
      d = alpha;
      d[aw] -= 1.0;  // d = alpha - e_aw
      gmax = alpha[aw] / (1.0 - alpha[aw]);
    } else {
      d = -alpha;
      d[fw] += 1.0;  // d = e_fw - alpha
      gmax = 1.0;
    }
    const VectorXd Kd = K * d;
    const double curv = d.dot(Kd);
    double gamma = gmax;
    if (curv > 0.0) gamma = std::clamp(g.dot(d) / (2.0 * curv), 0.0, gmax);
    if (gamma <= 0.0) break;
    alpha += gamma * d;
    Ka += gamma * Kd;
    // clean tiny negatives from the away steps
    for (Index i = 0; i < s; ++i)
      if (alpha[i] < 0.0) alpha[i] = 0.0;
    alpha /= alpha.sum();
  }
}

}  // namespace

MEBSolution meb_coreset(const std::function<double(Index, Index)>& kernel, Index n,
                        double epsilon, std::uint64_t seed) {
  if (n < 2) throw validation_error("meb_coreset: need at least 2 points");
  if (epsilon <= 0.0) throw validation_error("meb_coreset: epsilon must be positive");

  VectorXd diag(n);
  for (Index i = 0; i < n; ++i) diag[i] = kernel(i, i);
  const double scale = std::max(1.0, diag.cwiseAbs().maxCoeff());
  const double neg_tol = 1e-9 * scale;
  if (diag.minCoeff() < -neg_tol)
    throw numerical_error("meb_coreset: negative self-similarity; square the kernel first");

  std::mt19937_64 rng(seed);
  const Index i0 = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
  // farthest point from i0 in feature space
  Index k0 = (i0 == 0) ? 1 : 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    if (i == i0) continue;
    const double d2 = diag[i] - 2.0 * kernel(i, i0) + diag[i0];
    if (d2 > best) {
      best = d2;
      k0 = i;
    }
  }

  std::vector<Index> S{i0, k0};
  VectorXd alpha = VectorXd::Constant(2, 0.5);
  MatrixXd Ks(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) Ks(a, b) = kernel(S[a], S[b]);

  const int cap = static_cast<int>(std::ceil(2.0 / (epsilon * epsilon)));
  double r2 = 0.0;
  for (int outer = 0; outer < cap; ++outer) {
    solve_dual_meb(Ks, alpha);
    const double center_sq = alpha.dot(Ks * alpha);
    r2 = alpha.dot(Ks.diagonal()) - center_sq;
    if (r2 < -neg_tol)
      throw numerical_error("meb_coreset: negative squared radius; square the kernel first");
    r2 = std::max(r2, 0.0);

    // scan for the worst violator of the (1+eps) ball
    Index worst = -1;
    double worst_d2 = r2 * (1.0 + epsilon) * (1.0 + epsilon);
    for (Index i = 0; i < n; ++i) {
      double cx = 0.0;
      for (std::size_t j = 0; j < S.size(); ++j) cx += alpha[static_cast<Index>(j)] * kernel(i, S[j]);
      const double d2 = diag[i] - 2.0 * cx + center_sq;
      if (d2 < -neg_tol)
        throw numerical_error("meb_coreset: negative self-distance; square the kernel first");
      if (d2 > worst_d2) {
        worst_d2 = d2;
        worst = i;
      }
    }
    if (worst < 0) break;

    const Index s = static_cast<Index>(S.size());
    Ks.conservativeResize(s + 1, s + 1);
    for (Index j = 0; j < s; ++j) {
      const double v = kernel(worst, S[static_cast<std::size_t>(j)]);
      Ks(s, j) = v;
      Ks(j, s) = v;
    }
    Ks(s, s) = diag[worst];
    S.push_back(worst);
    alpha.conservativeResize(s + 1);
    alpha[s] = 0.0;  // warm start
  }

  MEBSolution sol;
  sol.epsilon = epsilon;
  sol.radius = std::sqrt(r2);
  for (std::size_t j = 0; j < S.size(); ++j) {
    if (alpha[static_cast<Index>(j)] > 1e-8) {
      sol.core_set.push_back(S[j]);
      sol.dual_weights.conservativeResize(sol.dual_weights.size() + 1);
      sol.dual_weights[sol.dual_weights.size() - 1] = alpha[static_cast<Index>(j)];
    }
  }
  sol.dual_weights /= sol.dual_weights.sum();
  return sol;
}

LandmarkReport meb_landmarks(const MatrixXd& K, const std::vector<int>& labels, double epsilon,
                             std::uint64_t seed) {
  require_symmetric(K, 1e-8);
  if (static_cast<Index>(labels.size()) != K.rows())
    throw validation_error("meb_landmarks: label count does not match matrix size");

  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw validation_error("meb_landmarks: need at least two classes");

  LandmarkReport rep;
  rep.method = "meb";
  rep.epsilon = epsilon;
  rep.seed = seed;

  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const int c = classes[ci];
    std::vector<Index> idx;
    for (Index i = 0; i < K.rows(); ++i)
      if (labels[static_cast<std::size_t>(i)] == c) idx.push_back(i);
    if (idx.size() < 2)
      throw validation_error("meb_landmarks: class " + std::to_string(c) + " has fewer than 2 points");

    const Index nc = static_cast<Index>(idx.size());
    MatrixXd Kc(nc, nc);
    for (Index a = 0; a < nc; ++a)
      for (Index b = 0; b < nc; ++b) Kc(a, b) = K(idx[a], idx[b]);

    // Algorithm step 4: square the class block if indefinite.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Kc);
    const double amax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (amax > 0.0 && es.eigenvalues().minCoeff() < -1e-10 * amax) {
      Kc = (Kc * Kc.transpose()).eval();
      Kc = 0.5 * (Kc + Kc.transpose().eval());
    }

    const std::uint64_t class_seed = seed ^ (0x9e3779b97f4a7c15ULL * (ci + 1));
    const MEBSolution sol = meb_coreset(
        [&Kc](Index a, Index b) { return Kc(a, b); }, nc, epsilon, class_seed);

    rep.per_class_counts[c] = static_cast<Index>(sol.core_set.size());
    for (Index local : sol.core_set) rep.indices.push_back(idx[static_cast<std::size_t>(local)]);
  }

  std::sort(rep.indices.begin(), rep.indices.end());
  rep.indices.erase(std::unique(rep.indices.begin(), rep.indices.end()), rep.indices.end());
  rep.m = static_cast<Index>(rep.indices.size());

  const NystromFactors F = nystrom_factorize(K, rep.indices);
  rep.smss = smss(F, K, labels);
  return rep;
}

namespace {

std::vector<Index> distinct_sample(Index n, Index m, std::mt19937_64& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < m; ++i) {
    const Index j = i + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  return pool;
}

// Lloyd iterations on the rows of R; returns the index of the point nearest each centroid.
std::vector<Index> lloyd_rows(const MatrixXd& R, Index m, std::uint64_t seed) {
  const Index n = R.rows();
  std::mt19937_64 rng(seed);
  const std::vector<Index> init = distinct_sample(n, m, rng);
  MatrixXd C(m, R.cols());
  for (Index j = 0; j < m; ++j) C.row(j) = R.row(init[static_cast<std::size_t>(j)]);

  const VectorXd rn = R.rowwise().squaredNorm();
  std::vector<Index> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < 50; ++it) {
    const VectorXd cn = C.rowwise().squaredNorm();
    const MatrixXd dot = R * C.transpose();  // n x m
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < m; ++j) {
        const double d = rn[i] - 2.0 * dot(i, j) + cn[j];
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    MatrixXd sums = MatrixXd::Zero(m, R.cols());
    VectorXd counts = VectorXd::Zero(m);
    for (Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += R.row(i);
      counts[assign[static_cast<std::size_t>(i)]] += 1.0;
    }
    for (Index j = 0; j < m; ++j)
      if (counts[j] > 0.0) C.row(j) = sums.row(j) / counts[j];  // empty cluster keeps centroid
  }

  // landmark = point minimizing distance to the cluster mean
  std::vector<Index> lm;
  const VectorXd cn = C.rowwise().squaredNorm();
  const MatrixXd dot = R * C.transpose();
  for (Index j = 0; j < m; ++j) {
    Index best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double d = rn[i] - 2.0 * dot(i, j) + cn[j];
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    lm.push_back(best);
  }
  std::sort(lm.begin(), lm.end());
  lm.erase(std::unique(lm.begin(), lm.end()), lm.end());
  return lm;
}

}  // namespace

LandmarkReport kmeans_landmarks(const MatrixXd& K, Index m, std::uint64_t seed) {
  require_symmetric(K, 1e-8);
  if (m < 1 || m > K.rows()) throw validation_error("kmeans_landmarks: m out of range");
  LandmarkReport rep;
  rep.method = "kmeans";
  rep.m = m;
  rep.seed = seed;
  rep.indices = lloyd_rows(K, m, seed);
  return rep;
}

LandmarkReport kmeans_landmarks(const NystromFactors& F, Index m, std::uint64_t seed) {
  if (m < 1 || m > F.n) throw validation_error("kmeans_landmarks: m out of range");
  // E = cross (W+ G^{1/2}) has Gram matrix K~^2: row distances match the squared kernel.
  MatrixXd G = F.cross.transpose() * F.cross;
  G = 0.5 * (G + G.transpose().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  if (es.info() != Eigen::Success) throw numerical_error("kmeans_landmarks: eigensolver failed");
  VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const MatrixXd Ghalf = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
  const MatrixXd E = F.cross * (F.landmark_block_pinv * Ghalf);

  LandmarkReport rep;
  rep.method = "kmeans";
  rep.m = m;
  rep.seed = seed;
  rep.indices = lloyd_rows(E, m, seed);
  return rep;
}

LandmarkReport random_landmarks(Index n, Index m, std::uint64_t seed) {
  if (m < 1 || m > n) throw validation_error("random_landmarks: m out of range");
  std::mt19937_64 rng(seed);
  LandmarkReport rep;
  rep.method = "random";
  rep.m = m;
  rep.seed = seed;
  rep.indices = distinct_sample(n, m, rng);
  std::sort(rep.indices.begin(), rep.indices.end());
  return rep;
}

double smss_f(const MatrixXd& S, const std::vector<int>& labels) {
  const Index n = S.rows();
  if (static_cast<Index>(labels.size()) != n)
    throw validation_error("smss: label count does not match matrix size");
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw validation_error("smss: need at least two classes");

  double f = 0.0;
  for (int c : classes) {
    double diag = 0.0, na = 0.0;
    // sums over the class block and its complement
    double in_in = 0.0, in_out = 0.0;
    for (Index i = 0; i < n; ++i) {
      const bool ic = labels[static_cast<std::size_t>(i)] == c;
      if (!ic) continue;
      na += 1.0;
      diag += S(i, i);
      for (Index j = 0; j < n; ++j) {
        if (labels[static_cast<std::size_t>(j)] == c) in_in += S(i, j);
        else in_out += S(i, j);
      }
    }
    const double nb = static_cast<double>(n) - na;
    if (na < 2.0) throw validation_error("smss: class needs at least 2 points for a within mean");
    const double within = (in_in - diag) / (na * na - na);
    const double between = in_out / (na * nb);
    f += std::abs(within - between);
  }
  return f;
}

double smss(const NystromFactors& approx, const MatrixXd& original,
            const std::vector<int>& labels) {
  if (approx.n != original.rows())
    throw validation_error("smss: factor size does not match original matrix");
  const double fk = smss_f(original, labels);
  if (fk == 0.0) throw numerical_error("smss: f(K) = 0, margin degenerate");

  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  // factored block sums: 1_A^T K~ 1_B = (cross^T 1_A)^T W+ (cross^T 1_B); diagonal via rows.
  const MatrixXd TW = approx.cross * approx.landmark_block_pinv;  // N x m
  const VectorXd diag_all = (TW.cwiseProduct(approx.cross)).rowwise().sum();

  const Index n = approx.n;
  double fh = 0.0;
  for (int c : classes) {
    VectorXd ua = VectorXd::Zero(approx.m()), ub = VectorXd::Zero(approx.m());
    double na = 0.0, diag = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) {
        ua += approx.cross.row(i).transpose();
        diag += diag_all[i];
        na += 1.0;
      } else {
        ub += approx.cross.row(i).transpose();
      }
    }
    const double nb = static_cast<double>(n) - na;
    const VectorXd wua = approx.landmark_block_pinv * ua;
    const double in_in = ua.dot(wua);
    const double in_out = ub.dot(wua);
    const double within = (in_in - diag) / (na * na - na);
    const double between = in_out / (na * nb);
    fh += std::abs(within - between);
  }
  return fh / fk;
}

}  // namespace nyk
