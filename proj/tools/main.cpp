// nyk: kernel-matrix experiment driver.
//
// Subcommands: gen, landmarks, train, predict, crossval, smss, bench-scaling.
// Exit codes: 0 success, 2 validation error (bad arguments/inputs), 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nyk/crossval.hpp"
#include "nyk/io.hpp"

namespace {

using namespace nyk;

LabeledDataset make_dataset(const std::string& name, Index n, std::uint64_t seed) {
  if (name == "ball") return gen_ball(n, seed);
  if (name == "checkerboard") return gen_checkerboard(n, seed);
  if (name == "gauss_overlap") return gen_gauss_overlap(n, seed);
  if (name == "pe_gaussians") return gen_pe_gaussians(n, seed);
  if (name == "magnification") return gen_magnification(seed);
  throw validation_error("unknown dataset: " + name);
}

LandmarkReport select_landmarks(const std::string& method, const MatrixXd& K,
                                const std::vector<int>& labels, double eps, Index m,
                                std::uint64_t seed) {
  if (method == "meb") return meb_landmarks(K, labels, eps, seed);
  if (method == "kmeans") return kmeans_landmarks(K, m, seed);
  if (method == "random") return random_landmarks(K.rows(), m, seed);
  throw validation_error("unknown landmark method: " + method);
}

std::string detect_model_kind(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open file: " + path);
  std::string header;
  in >> header;
  if (header == "IKFD1") return "ikfd";
  if (header == "PCVM1") return "pcvm";
  throw validation_error("unrecognized model header in " + path);
}

int run(int argc, char** argv) {
  CLI::App app{"Nystrom-approximated indefinite-kernel classifiers"};
  app.require_subcommand(1);

  // --- gen -------------------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset as kernel + label files");
  std::string gen_name, gen_out, gen_format = "nyk1";
  long long gen_n = 200;
  long long gen_seed = 0;
  gen->add_option("dataset", gen_name,
                  "ball | checkerboard | gauss_overlap | pe_gaussians | magnification")
      ->required();
  gen->add_option("--n", gen_n, "points (per class for ball); ignored by magnification");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output base path (<base>.nyk1/.nykb and <base>.labels)")
      ->required();
  gen->add_option("--format", gen_format)->check(CLI::IsMember({"nyk1", "nykb"}));

  // --- landmarks -------------------------------------------------------------------------
  auto* lmc = app.add_subcommand("landmarks", "select landmarks on a kernel file");
  std::string lm_method, lm_kernel, lm_labels, lm_out;
  double lm_eps = 0.01;
  long long lm_m = 10, lm_seed = 0;
  lmc->add_option("method", lm_method, "meb | kmeans | random")->required();
  lmc->add_option("--kernel", lm_kernel)->required();
  lmc->add_option("--labels", lm_labels, "required for meb");
  lmc->add_option("--eps", lm_eps, "MEB precision");
  lmc->add_option("--m", lm_m, "landmark count for kmeans/random");
  lmc->add_option("--seed", lm_seed);
  lmc->add_option("--out", lm_out, "landmark report path")->required();

  // --- train -----------------------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "train a classifier on a kernel + label file");
  std::string tr_clf, tr_kernel, tr_labels, tr_out, tr_selector = "meb", tr_lm_in, tr_lm_out;
  double tr_eps = 0.01;
  long long tr_m = 10, tr_seed = 0;
  tr->add_option("classifier", tr_clf, "ikfd | ny-ikfd | pcvm | ny-pcvm")->required();
  tr->add_option("--kernel", tr_kernel)->required();
  tr->add_option("--labels", tr_labels)->required();
  tr->add_option("--selector", tr_selector, "meb | kmeans | random (Nystrom classifiers)");
  tr->add_option("--eps", tr_eps);
  tr->add_option("--m", tr_m);
  tr->add_option("--seed", tr_seed);
  tr->add_option("--landmarks", tr_lm_in, "use a precomputed landmark report");
  tr->add_option("--landmarks-out", tr_lm_out,
                 "where to write the landmark report (default <out>.landmarks)");
  tr->add_option("--out", tr_out, "model path")->required();

  // --- predict ---------------------------------------------------------------------------
  auto* pr = app.add_subcommand("predict", "score new points against a trained model");
  std::string pr_model, pr_rows, pr_out, pr_scores, pr_train_kernel, pr_landmarks;
  pr->add_option("--model", pr_model)->required();
  pr->add_option("--rows", pr_rows,
                 "NYK1 block: tests x N (dense model) or tests x m (with --landmarks)")
      ->required();
  pr->add_option("--train-kernel", pr_train_kernel, "training kernel (Nystrom models)");
  pr->add_option("--landmarks", pr_landmarks, "landmark report (Nystrom models)");
  pr->add_option("--out", pr_out, "predicted labels, one per line")->required();
  pr->add_option("--scores", pr_scores, "optional per-point score/probability file");

  // --- crossval --------------------------------------------------------------------------
  auto* cv = app.add_subcommand("crossval", "stratified k-fold experiment from a spec file");
  std::string cv_spec;
  cv->add_option("--spec", cv_spec, "key = value experiment file")->required();

  // --- smss ------------------------------------------------------------------------------
  auto* sm = app.add_subcommand("smss", "supervised approximation quality of a landmark set");
  std::string sm_kernel, sm_labels, sm_landmarks;
  sm->add_option("--kernel", sm_kernel)->required();
  sm->add_option("--labels", sm_labels)->required();
  sm->add_option("--landmarks", sm_landmarks, "landmark report")->required();

  // --- bench-scaling ---------------------------------------------------------------------
  auto* bs = app.add_subcommand("bench-scaling", "wall-time scaling against dataset size");
  std::string bs_clf = "ny-ikfd";
  std::vector<long long> bs_ns;
  long long bs_m = 64, bs_seed = 0;
  bs->add_option("--classifier", bs_clf, "ikfd | ny-ikfd");
  bs->add_option("--n", bs_ns, "ascending dataset sizes")->required()->expected(-1);
  bs->add_option("--m", bs_m, "landmark count for ny-ikfd");
  bs->add_option("--seed", bs_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  if (*gen) {
    const LabeledDataset d = make_dataset(gen_name, static_cast<Index>(gen_n),
                                          static_cast<std::uint64_t>(gen_seed));
    const MatrixXd K = dataset_kernel(d);
    if (gen_format == "nykb") write_nykb(gen_out + ".nykb", K);
    else write_nyk1(gen_out + ".nyk1", K);
    write_labels(gen_out + ".labels", d.labels);
    std::cout << "wrote " << gen_out << "." << gen_format << " (" << K.rows() << "x"
              << K.cols() << ") and " << gen_out << ".labels\n";
    return 0;
  }

  if (*lmc) {
    const MatrixXd K = read_kernel_file(lm_kernel);
    std::vector<int> y;
    if (!lm_labels.empty()) y = read_labels(lm_labels);
    else if (lm_method == "meb") throw validation_error("landmarks meb: --labels required");
    const LandmarkReport R =
        select_landmarks(lm_method, K, y, lm_eps, static_cast<Index>(lm_m),
                         static_cast<std::uint64_t>(lm_seed));
    write_landmark_report(lm_out, R);
    std::cout << "selected " << R.indices.size() << " landmarks (" << R.method << ")\n";
    return 0;
  }

  if (*tr) {
    const MatrixXd K = read_kernel_file(tr_kernel);
    const std::vector<int> y = read_labels(tr_labels);
    if (static_cast<Index>(y.size()) != K.rows())
      throw validation_error("train: label count does not match kernel size");
    const bool nystrom = tr_clf == "ny-ikfd" || tr_clf == "ny-pcvm";

    NystromFactors F;
    if (nystrom) {
      LandmarkReport R;
      if (!tr_lm_in.empty()) R = read_landmark_report(tr_lm_in);
      else R = select_landmarks(tr_selector, K, y, tr_eps, static_cast<Index>(tr_m),
                                static_cast<std::uint64_t>(tr_seed));
      F = nystrom_factorize(K, R.indices);
      if (tr_lm_out.empty()) tr_lm_out = tr_out + ".landmarks";
      write_landmark_report(tr_lm_out, R);
    } else {
      std::vector<Index> all(static_cast<std::size_t>(K.rows()));
      std::iota(all.begin(), all.end(), Index{0});
      if (tr_clf == "ikfd") F = nystrom_factorize(K, all);
    }

    TrainConfig cfg;
    cfg.rng_seed = static_cast<std::uint64_t>(tr_seed);
    if (tr_clf == "ikfd" || tr_clf == "ny-ikfd") {
      write_ikfd_model(tr_out, train_ikfd(F, y));
    } else if (tr_clf == "pcvm") {
      write_pcvm_model(tr_out, train_pcvm_full(K, y, cfg));
    } else if (tr_clf == "ny-pcvm") {
      write_pcvm_model(tr_out, train_ny_pcvm(F, y, cfg));
    } else {
      throw validation_error("unknown classifier: " + tr_clf);
    }
    std::cout << "wrote " << tr_out << '\n';
    return 0;
  }

  if (*pr) {
    const std::string kind = detect_model_kind(pr_model);
    const MatrixXd rows = read_nyk1(pr_rows);
    const bool nystrom = !pr_landmarks.empty();
    if (nystrom && pr_train_kernel.empty())
      throw validation_error("predict: --landmarks requires --train-kernel");

    NystromFactors F;
    if (nystrom) {
      const MatrixXd Ktr = read_kernel_file(pr_train_kernel);
      const LandmarkReport R = read_landmark_report(pr_landmarks);
      F = nystrom_factorize(Ktr, R.indices);
      if (rows.cols() != F.m())
        throw validation_error("predict: rows must have one column per landmark");
    }

    std::ofstream labf(pr_out);
    if (!labf) throw validation_error("cannot write file: " + pr_out);
    std::ofstream scoref;
    if (!pr_scores.empty()) {
      scoref.open(pr_scores);
      if (!scoref) throw validation_error("cannot write file: " + pr_scores);
    }
    char buf[80];

    if (kind == "ikfd") {
      const IkfdModel M = read_ikfd_model(pr_model);
      if (!nystrom && rows.cols() != M.alpha.size())
        throw validation_error("predict: rows must have one column per training point");
      for (Index i = 0; i < rows.rows(); ++i) {
        const VectorXd r = nystrom ? nystrom_extend(F, rows.row(i).transpose())
                                   : VectorXd(rows.row(i).transpose());
        const IkfdPrediction p = predict_ikfd(M, r);
        labf << p.label << '\n';
        if (scoref.is_open()) {
          std::snprintf(buf, sizeof(buf), "%.17g %.17g", p.score, p.posterior);
          scoref << buf << '\n';
        }
      }
    } else {
      const PcvmModel M = read_pcvm_model(pr_model);
      for (Index i = 0; i < rows.rows(); ++i) {
        VectorXd at_active(static_cast<Index>(M.active.size()));
        if (nystrom) {
          const VectorXd ext = nystrom_extend(F, rows.row(i).transpose());
          for (std::size_t j = 0; j < M.active.size(); ++j)
            at_active[static_cast<Index>(j)] = ext[M.active[j]];
        } else {
          for (std::size_t j = 0; j < M.active.size(); ++j) {
            if (M.active[j] >= rows.cols())
              throw validation_error("predict: rows narrower than the model's basis indices");
            at_active[static_cast<Index>(j)] = rows(i, M.active[j]);
          }
        }
        const PcvmPrediction p = predict_pcvm(M, at_active);
        labf << p.label << '\n';
        if (scoref.is_open()) {
          std::snprintf(buf, sizeof(buf), "%.17g", p.probability);
          scoref << buf << '\n';
        }
      }
    }
    std::cout << "wrote " << pr_out << '\n';
    return 0;
  }

  if (*cv) {
    const ExperimentSpec spec = parse_spec_file(cv_spec);
    const CvReport R = crossval(spec);
    emit_cv_report(std::cout, R, spec, spec.output);
    if (!spec.output.empty()) {
      std::ofstream txt(spec.output + ".txt");
      if (!txt) throw validation_error("cannot write file: " + spec.output + ".txt");
      emit_cv_report(txt, R, spec, "");
    }
    return 0;
  }

  if (*sm) {
    const MatrixXd K = read_kernel_file(sm_kernel);
    const std::vector<int> y = read_labels(sm_labels);
    const LandmarkReport R = read_landmark_report(sm_landmarks);
    const NystromFactors F = nystrom_factorize(K, R.indices);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", smss(F, K, y));
    std::cout << "smss = " << buf << '\n';
    return 0;
  }

  if (*bs) {
    std::vector<Index> Ns(bs_ns.begin(), bs_ns.end());
    const ScalingTable T = scaling_bench(bs_clf, Ns, static_cast<Index>(bs_m),
                                         static_cast<std::uint64_t>(bs_seed));
    char buf[80];
    std::cout << "n,median_seconds\n";
    for (const auto& r : T.rows) {
      std::snprintf(buf, sizeof(buf), "%lld,%.6f", static_cast<long long>(r.n), r.seconds);
      std::cout << buf << '\n';
    }
    std::snprintf(buf, sizeof(buf), "%.4f", T.slope);
    std::cout << "loglog_slope = " << buf << '\n';
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const nyk::validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nyk::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
