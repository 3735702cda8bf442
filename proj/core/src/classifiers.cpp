#include "nyk/classifiers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace nyk {

namespace {

constexpr double kVarianceFloor = 1e-12;

void require_binary(const std::vector<int>& y) {
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw validation_error("labels must be +1/-1");
  }
  if (!pos || !neg) throw validation_error("both classes must be present");
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double probit(double z) {
  // erfc saturates to 0/2 around |z| ~ 38; clamp into the open interval the link promises
  const double p = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  if (p <= 0.0) return std::numeric_limits<double>::denorm_min();
  if (p >= 1.0) return 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return p;
}

// --- iKFD ---------------------------------------------------------------------------------------

IkfdModel train_ikfd(const NystromFactors& F, const std::vector<int>& labels) {
  if (static_cast<Index>(labels.size()) != F.n)
    throw validation_error("train_ikfd: label count does not match factor size");
  require_binary(labels);

  const Index n = F.n, m = F.m();
  VectorXd s_pos = VectorXd::Zero(m), s_neg = VectorXd::Zero(m);
  double n_pos = 0.0, n_neg = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] == 1) {
      s_pos += F.cross.row(i).transpose();
      n_pos += 1.0;
    } else {
      s_neg += F.cross.row(i).transpose();
      n_neg += 1.0;
    }
  }

  IkfdModel M;
  // classwise means in kernel-expansion coordinates, via factored row sums
  M.mean_pos = F.cross * (F.landmark_block_pinv * (s_pos / n_pos));
  M.mean_neg = F.cross * (F.landmark_block_pinv * (s_neg / n_neg));

  // within-class operator K^ = T H T^T with T = cross W+,
  // H = G - s+ s+^T/n+ - s- s-^T/n-  (m x m, psd by construction)
  MatrixXd G = F.cross.transpose() * F.cross;
  G = 0.5 * (G + G.transpose().eval());
  MatrixXd H = G - (s_pos * s_pos.transpose()) / n_pos - (s_neg * s_neg.transpose()) / n_neg;
  H = 0.5 * (H + H.transpose().eval());

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw numerical_error("train_ikfd: eigensolver failed");
  const VectorXd lam = es.eigenvalues();
  const double amax = std::max(lam.cwiseAbs().maxCoeff(), 0.0);

  const VectorXd diff = M.mean_pos - M.mean_neg;
  if (amax == 0.0) {
    // zero within-class spectrum: rank-0 pseudo-inverse path, direction collapses to zero
    M.alpha = VectorXd::Zero(n);
  } else {
    std::vector<Index> keep;
    for (Index i = 0; i < m; ++i)
      if (lam[i] > 1e-12 * amax) keep.push_back(i);
    MatrixXd B(n, static_cast<Index>(keep.size()));
    const MatrixXd T = F.cross * F.landmark_block_pinv;
    for (std::size_t c = 0; c < keep.size(); ++c)
      B.col(static_cast<Index>(c)) = T * (es.eigenvectors().col(keep[c]) * std::sqrt(lam[keep[c]]));

    const LowRankEvd evd = evd_from_factor(B);
    // drop below the relative floor, then alpha = C A^{-1} C^T diff
    VectorXd proj = evd.eigvecs.transpose() * diff;
    const double emax = evd.eigvals.size() ? evd.eigvals.cwiseAbs().maxCoeff() : 0.0;
    M.alpha = VectorXd::Zero(n);
    for (Index i = 0; i < evd.eigvals.size(); ++i) {
      if (std::abs(evd.eigvals[i]) <= 1e-10 * emax) continue;
      M.alpha += evd.eigvecs.col(i) * (proj[i] / evd.eigvals[i]);
    }
  }
  M.bias = -M.alpha.dot(M.mean_pos + M.mean_neg) / 2.0;

  // training projections through the factors -> classwise 1-D Gaussians
  const VectorXd scores =
      F.cross * (F.landmark_block_pinv * (F.cross.transpose() * M.alpha)) +
      VectorXd::Constant(n, M.bias);
  double mp = 0.0, mn = 0.0;
  for (Index i = 0; i < n; ++i)
    (labels[static_cast<std::size_t>(i)] == 1 ? mp : mn) += scores[i];
  mp /= n_pos;
  mn /= n_neg;
  double vp = 0.0, vn = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double d = scores[i] - (labels[static_cast<std::size_t>(i)] == 1 ? mp : mn);
    (labels[static_cast<std::size_t>(i)] == 1 ? vp : vn) += d * d;
  }
  M.posterior.mean_pos = mp;
  M.posterior.mean_neg = mn;
  M.posterior.var_pos = std::max(vp / n_pos, kVarianceFloor);
  M.posterior.var_neg = std::max(vn / n_neg, kVarianceFloor);
  return M;
}

IkfdPrediction predict_ikfd(const IkfdModel& M, const VectorXd& kernel_row) {
  if (kernel_row.size() != M.alpha.size())
    throw validation_error("predict_ikfd: kernel row length does not match model size");
  IkfdPrediction p;
  p.score = kernel_row.dot(M.alpha) + M.bias;
  p.label = (p.score >= 0.0) ? 1 : -1;  // sign(0) = +1
  const double lp = -0.5 * (p.score - M.posterior.mean_pos) * (p.score - M.posterior.mean_pos) /
                        M.posterior.var_pos -
                    0.5 * std::log(M.posterior.var_pos);
  const double ln = -0.5 * (p.score - M.posterior.mean_neg) * (p.score - M.posterior.mean_neg) /
                        M.posterior.var_neg -
                    0.5 * std::log(M.posterior.var_neg);
  // equal priors; stable two-way softmax
  const double mx = std::max(lp, ln);
  const double ep = std::exp(lp - mx), en = std::exp(ln - mx);
  p.posterior = ep / (ep + en);
  return p;
}

// --- PCVM ---------------------------------------------------------------------------------------

// Truncated-normal mean of the probit EM E-step: H_i = z_i + y_i phi(z_i)/Phi(y_i z_i),
// with the asymptotic Mills ratio for deep tails.
double pcvm_estep_mean(double z, int y) {
  const double t = y * z;
  double ratio;  // phi(z)/Phi(y z) = phi(t)/Phi(t)
  if (t < -8.0) {
    ratio = -t - 1.0 / t;  // Mills asymptote, relative error < 1e-12 at the switch
  } else {
    ratio = normal_pdf(t) / probit(t);
  }
  return z + y * ratio;
}

namespace {

struct ActiveState {
  std::vector<Index> active;   // indices into the training set
  VectorXd w;                  // aligned with active
};

// st.w lives in the label-scaled basis Phi_A = K[:,A] diag(y_A): the truncated prior demands
// w >= 0 there, which is the sign constraint y_i c_i >= 0 on the plain-kernel coefficients
// c = y o w.  Zero violators (w_i < 0), then drop w_i <= threshold.
void prune(ActiveState& st, double threshold) {
  std::vector<Index> keep_idx;
  std::vector<double> keep_w;
  for (std::size_t j = 0; j < st.active.size(); ++j) {
    double wj = st.w[static_cast<Index>(j)];
    if (wj < 0.0) wj = 0.0;
    if (wj <= threshold) continue;
    keep_idx.push_back(st.active[j]);
    keep_w.push_back(wj);
  }
  st.active = std::move(keep_idx);
  st.w.resize(static_cast<Index>(keep_w.size()));
  for (std::size_t j = 0; j < keep_w.size(); ++j) st.w[static_cast<Index>(j)] = keep_w[j];
}

PcvmModel finish_model(const ActiveState& st, const std::vector<int>& y, double bias,
                       double threshold) {
  PcvmModel M;
  M.weights = st.w;
  M.bias = bias;
  M.active = st.active;
  M.basis_labels.reserve(st.active.size());
  for (Index i : st.active) M.basis_labels.push_back(y[static_cast<std::size_t>(i)]);
  M.prune_threshold = threshold;
  return M;
}

}  // namespace

PcvmModel train_pcvm_full(const MatrixXd& K, const std::vector<int>& labels,
                          const TrainConfig& cfg, PcvmTrace* trace) {
  require_symmetric(K, 1e-8);
  const Index n = K.rows();
  if (static_cast<Index>(labels.size()) != n)
    throw validation_error("train_pcvm_full: label count does not match matrix size");
  require_binary(labels);
  if (n > cfg.pcvm_dense_cutoff)
    throw validation_error("train_pcvm_full: N exceeds the dense cutoff; use train_ny_pcvm");

  VectorXd yv(n);
  for (Index i = 0; i < n; ++i) yv[i] = labels[static_cast<std::size_t>(i)];

  ActiveState st;
  st.active.resize(static_cast<std::size_t>(n));
  std::iota(st.active.begin(), st.active.end(), Index{0});
  // w = 1/N in the label-scaled basis, i.e. plain-kernel coefficients c = y/N
  st.w = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double bias = 0.0;

  VectorXd w_prev_full = VectorXd::Constant(n, 1.0 / static_cast<double>(n));

  for (int it = 0; it < cfg.max_iters; ++it) {
    const Index a = static_cast<Index>(st.active.size());
    // Phi_A = K[:, A] diag(y_A)
    MatrixXd PhiA(n, a);
    for (Index j = 0; j < a; ++j)
      PhiA.col(j) = K.col(st.active[static_cast<std::size_t>(j)]) *
                    yv[st.active[static_cast<std::size_t>(j)]];

    const VectorXd z = PhiA * st.w + VectorXd::Constant(n, bias);
    VectorXd hbar(n);
    for (Index i = 0; i < n; ++i)
      hbar[i] = pcvm_estep_mean(z[i], labels[static_cast<std::size_t>(i)]);

    // M-step: Upsilon = diag(d) Phi^T Phi diag(d) + I, d_i = sqrt(2|w_i|); w = d o u
    const VectorXd d = (2.0 * st.w.cwiseAbs().array()).sqrt().matrix();
    const MatrixXd Q = PhiA.transpose() * PhiA;
    MatrixXd U = d.asDiagonal() * Q * d.asDiagonal();
    U.diagonal().array() += 1.0;
    const VectorXd rhs = d.cwiseProduct(PhiA.transpose() * (hbar - VectorXd::Constant(n, bias)));
    const VectorXd u = Eigen::LLT<MatrixXd>(U).solve(rhs);
    st.w = d.cwiseProduct(u);

    // bias through its own latent scale t = sqrt(2|b|): b = 0 is a fixed point, applied literally
    const double t = std::sqrt(2.0 * std::abs(bias));
    const double t2 = t * t;
    bias = (t2 / (1.0 + t2 * static_cast<double>(n))) * (hbar - PhiA * st.w).sum();

    prune(st, cfg.prune_threshold);
    if (st.active.empty())
      throw numerical_error("pcvm: all weights pruned at iteration " + std::to_string(it + 1));

    VectorXd w_full = VectorXd::Zero(n);
    for (std::size_t j = 0; j < st.active.size(); ++j)
      w_full[st.active[j]] = st.w[static_cast<Index>(j)];
    const double delta = (w_full - w_prev_full).cwiseAbs().maxCoeff();
    w_prev_full = w_full;
    if (trace) {
      // recorded as plain-kernel coefficients c = y o w so y_i c_i >= 0 reads off directly
      trace->weights.push_back(yv.cwiseProduct(w_full));
      trace->active.push_back(st.active);
      trace->bias.push_back(bias);
    }
    if (delta <= 1e-6) break;
  }
  return finish_model(st, labels, bias, cfg.prune_threshold);
}

PcvmModel train_ny_pcvm(const NystromFactors& F, const std::vector<int>& labels,
                        const TrainConfig& cfg, PcvmTrace* trace) {
  const Index n = F.n;
  if (static_cast<Index>(labels.size()) != n)
    throw validation_error("train_ny_pcvm: label count does not match factor size");
  require_binary(labels);

  VectorXd yv(n);
  for (Index i = 0; i < n; ++i) yv[i] = labels[static_cast<std::size_t>(i)];

  // K1 = cross, K2 = W+ cross^T; K~ = K1 K2.  All products stay N x m.
  const MatrixXd& K1 = F.cross;
  const MatrixXd K2 = F.landmark_block_pinv * F.cross.transpose();
  const MatrixXd G = K1.transpose() * K1;  // m x m Gram of the cross block

  ActiveState st;
  st.active.resize(static_cast<std::size_t>(n));
  std::iota(st.active.begin(), st.active.end(), Index{0});
  // w = 1/N in the label-scaled basis, i.e. plain-kernel coefficients c = y/N
  st.w = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double bias = 0.0;

  VectorXd w_prev_full = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  std::mt19937_64 rng(cfg.rng_seed);

  for (int it = 0; it < cfg.max_iters; ++it) {
    const Index a = static_cast<Index>(st.active.size());
    // Phi_A v = K1 (K2[:, A] (y_A o v));  Phi_A^T r = y_A o (K2[:, A]^T (K1^T r))
    MatrixXd K2A(F.m(), a);
    VectorXd yA(a);
    for (Index j = 0; j < a; ++j) {
      K2A.col(j) = K2.col(st.active[static_cast<std::size_t>(j)]);
      yA[j] = yv[st.active[static_cast<std::size_t>(j)]];
    }

    const VectorXd z = K1 * (K2A * yA.cwiseProduct(st.w)) + VectorXd::Constant(n, bias);
    VectorXd hbar(n);
    for (Index i = 0; i < n; ++i)
      hbar[i] = pcvm_estep_mean(z[i], labels[static_cast<std::size_t>(i)]);

    const VectorXd d = (2.0 * st.w.cwiseAbs().array()).sqrt().matrix();
    const VectorXd phi_t_r =
        yA.cwiseProduct(K2A.transpose() * (K1.transpose() * (hbar - VectorXd::Constant(n, bias))));
    const VectorXd rhs = d.cwiseProduct(phi_t_r);

    // Q_A = (Phi^T Phi)[A,A] = diag(y_A) (K2A^T G K2A) diag(y_A); only columns of Q_A are
    // ever formed, so nothing here grows past a x m*.
    auto q_col = [&](Index p) -> VectorXd {
      return yA[p] * yA.cwiseProduct(K2A.transpose() * (G * K2A.col(p)));
    };

    VectorXd u;
    if (a < static_cast<Index>(cfg.small_problem_cutoff)) {
      // dense reduced update on the small active basis
      const MatrixXd QA = yA.asDiagonal() * (K2A.transpose() * (G * K2A)) * yA.asDiagonal();
      MatrixXd U = d.asDiagonal() * QA * d.asDiagonal();
      U.diagonal().array() += 1.0;
      u = Eigen::LLT<MatrixXd>(U).solve(rhs);
    } else {
      // Upsilon-Nystrom: m* columns of Upsilon at per-iteration resampled active positions
      const Index mstar = std::max<Index>(
          2, std::min<Index>(cfg.upsilon_landmark_cap,
                             static_cast<Index>(std::ceil(cfg.upsilon_landmark_fraction *
                                                          static_cast<double>(a)))));
      std::vector<Index> pos(static_cast<std::size_t>(a));
      std::iota(pos.begin(), pos.end(), Index{0});
      for (Index i = 0; i < mstar; ++i) {
        const Index j = i + static_cast<Index>(rng() % static_cast<std::uint64_t>(a - i));
        std::swap(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]);
      }
      pos.resize(static_cast<std::size_t>(mstar));
      std::sort(pos.begin(), pos.end());

      NystromFactors UF;
      UF.n = a;
      UF.landmarks = pos;
      UF.cross.resize(a, mstar);
      for (Index c = 0; c < mstar; ++c) {
        const Index pc = pos[static_cast<std::size_t>(c)];
        UF.cross.col(c) = d[pc] * q_col(pc).cwiseProduct(d);
        UF.cross(pc, c) += 1.0;  // + I column
      }
      UF.landmark_block.resize(mstar, mstar);
      for (Index r = 0; r < mstar; ++r)
        UF.landmark_block.row(r) = UF.cross.row(pos[static_cast<std::size_t>(r)]);
      UF.landmark_block = 0.5 * (UF.landmark_block + UF.landmark_block.transpose().eval());
      UF.landmark_block_pinv = sym_pinv(UF.landmark_block);
      u = pinv_apply(nystrom_pinv(UF), rhs);
    }
    st.w = d.cwiseProduct(u);

    const double t = std::sqrt(2.0 * std::abs(bias));
    const double t2 = t * t;
    bias = (t2 / (1.0 + t2 * static_cast<double>(n))) *
           (hbar - K1 * (K2A * yA.cwiseProduct(st.w))).sum();

    prune(st, cfg.prune_threshold);
    if (st.active.empty())
      throw numerical_error("ny-pcvm: all weights pruned at iteration " + std::to_string(it + 1));

    VectorXd w_full = VectorXd::Zero(n);
    for (std::size_t j = 0; j < st.active.size(); ++j)
      w_full[st.active[j]] = st.w[static_cast<Index>(j)];
    const double delta = (w_full - w_prev_full).cwiseAbs().maxCoeff();
    w_prev_full = w_full;
    if (trace) {
      // recorded as plain-kernel coefficients c = y o w so y_i c_i >= 0 reads off directly
      trace->weights.push_back(yv.cwiseProduct(w_full));
      trace->active.push_back(st.active);
      trace->bias.push_back(bias);
    }
    if (delta <= 1e-6) break;
  }
  return finish_model(st, labels, bias, cfg.prune_threshold);
}

PcvmPrediction predict_pcvm(const PcvmModel& M, const VectorXd& kernel_row_active) {
  if (kernel_row_active.size() != static_cast<Index>(M.active.size()))
    throw validation_error("predict_pcvm: kernel row length does not match active basis");
  double score = M.bias;
  for (Index j = 0; j < kernel_row_active.size(); ++j)
    score += M.weights[j] * M.basis_labels[static_cast<std::size_t>(j)] * kernel_row_active[j];
  PcvmPrediction p;
  p.probability = probit(score);
  p.label = (p.probability >= 0.5) ? 1 : -1;
  return p;
}

std::vector<int> binary_view(const std::vector<int>& labels, int positive_class) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = (labels[i] == positive_class) ? 1 : -1;
  return out;
}

}  // namespace nyk
