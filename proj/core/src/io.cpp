#include "nyk/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace nyk {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw validation_error("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw validation_error("cannot write file: " + path);
  return out;
}

double read_double(std::istream& in, const std::string& what) {
  double v;
  if (!(in >> v)) throw validation_error("malformed " + what + ": expected a number");
  return v;
}

long long read_int(std::istream& in, const std::string& what) {
  long long v;
  if (!(in >> v)) throw validation_error("malformed " + what + ": expected an integer");
  return v;
}

void expect_tag(std::istream& in, const std::string& tag, const std::string& what) {
  std::string tok;
  if (!(in >> tok) || tok != tag)
    throw validation_error("malformed " + what + ": expected '" + tag + "'");
}

// like read_double but accepts "nan"/"inf" tokens, which stream extraction rejects
double read_double_token(std::istream& in, const std::string& what) {
  std::string tok;
  if (!(in >> tok)) throw validation_error("malformed " + what + ": expected a number");
  try {
    std::size_t pos;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw validation_error("malformed " + what + ": expected a number, got '" + tok + "'");
  }
}

MatrixXd read_matrix_body(std::istream& in, Index rows, Index cols, const std::string& what) {
  if (rows < 0 || cols < 0) throw validation_error("malformed " + what + ": negative size");
  MatrixXd M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = read_double(in, what);
  return M;
}

}  // namespace

MatrixXd read_nyk1(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_tag(in, "NYK1", "NYK1 file");
  std::string rest;
  std::getline(in, rest);
  std::istringstream header(rest);
  long long rows = read_int(header, "NYK1 header");
  long long cols = rows;
  long long extra;
  if (header >> extra) cols = extra;
  return read_matrix_body(in, static_cast<Index>(rows), static_cast<Index>(cols), path);
}

void write_nyk1(const std::string& path, const MatrixXd& M) {
  std::ofstream out = open_out(path);
  out << "NYK1 " << M.rows();
  if (M.rows() != M.cols()) out << ' ' << M.cols();
  out << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ' ';
      out << fmt17(M(i, j));
    }
    out << '\n';
  }
}

MatrixXd read_nykb(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "NYKB", 4) != 0)
    throw validation_error("not a NYKB file: " + path);
  std::uint64_t n = 0;
  unsigned char raw[8];
  if (!in.read(reinterpret_cast<char*>(raw), 8))
    throw validation_error("truncated NYKB header: " + path);
  for (int b = 7; b >= 0; --b) n = (n << 8) | raw[b];
  if (n > (1u << 20)) throw validation_error("NYKB size implausible: " + path);
  MatrixXd M(static_cast<Index>(n), static_cast<Index>(n));
  static_assert(sizeof(double) == 8);
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Index i = 0; i < M.rows(); ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(8 * n)))
      throw validation_error("truncated NYKB body: " + path);
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = row[static_cast<std::size_t>(j)];
  }
  return M;
}

void write_nykb(const std::string& path, const MatrixXd& M) {
  if (M.rows() != M.cols()) throw validation_error("NYKB holds square matrices only");
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out.write("NYKB", 4);
  const std::uint64_t n = static_cast<std::uint64_t>(M.rows());
  unsigned char raw[8];
  for (int b = 0; b < 8; ++b) raw[b] = static_cast<unsigned char>((n >> (8 * b)) & 0xff);
  out.write(reinterpret_cast<const char*>(raw), 8);
  static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");
  std::vector<double> row(static_cast<std::size_t>(M.cols()));
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) row[static_cast<std::size_t>(j)] = M(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(8 * row.size()));
  }
}

MatrixXd read_kernel_file(const std::string& path) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (std::memcmp(magic, "NYKB", 4) == 0) return read_nykb(path);
  if (std::memcmp(magic, "NYK1", 4) == 0) return read_nyk1(path);
  throw validation_error("unrecognized kernel file magic: " + path);
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<int> labels;
  long long v;
  while (in >> v) labels.push_back(static_cast<int>(v));
  if (!in.eof()) throw validation_error("malformed label file: " + path);
  if (labels.empty()) throw validation_error("empty label file: " + path);
  return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out = open_out(path);
  for (int y : labels) out << y << '\n';
}

void write_ikfd_model(const std::string& path, const IkfdModel& M) {
  std::ofstream out = open_out(path);
  out << "IKFD1\n" << M.alpha.size() << '\n';
  auto vec = [&](const VectorXd& v) {
    for (Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << fmt17(v[i]);
    out << '\n';
  };
  vec(M.alpha);
  out << fmt17(M.bias) << '\n';
  vec(M.mean_pos);
  vec(M.mean_neg);
  out << fmt17(M.posterior.mean_pos) << ' ' << fmt17(M.posterior.var_pos) << ' '
      << fmt17(M.posterior.mean_neg) << ' ' << fmt17(M.posterior.var_neg) << '\n';
}

IkfdModel read_ikfd_model(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_tag(in, "IKFD1", path);
  const Index n = static_cast<Index>(read_int(in, path));
  if (n < 0) throw validation_error("malformed " + path + ": negative count");
  IkfdModel M;
  auto vec = [&](VectorXd& v) {
    v.resize(n);
    for (Index i = 0; i < n; ++i) v[i] = read_double(in, path);
  };
  vec(M.alpha);
  M.bias = read_double(in, path);
  vec(M.mean_pos);
  vec(M.mean_neg);
  M.posterior.mean_pos = read_double(in, path);
  M.posterior.var_pos = read_double(in, path);
  M.posterior.mean_neg = read_double(in, path);
  M.posterior.var_neg = read_double(in, path);
  return M;
}

void write_pcvm_model(const std::string& path, const PcvmModel& M) {
  std::ofstream out = open_out(path);
  out << "PCVM1\n" << M.active.size() << '\n';
  for (std::size_t i = 0; i < M.active.size(); ++i) out << (i ? " " : "") << M.active[i];
  out << '\n';
  for (Index i = 0; i < M.weights.size(); ++i) out << (i ? " " : "") << fmt17(M.weights[i]);
  out << '\n';
  for (std::size_t i = 0; i < M.basis_labels.size(); ++i)
    out << (i ? " " : "") << M.basis_labels[i];
  out << '\n';
  out << fmt17(M.bias) << ' ' << fmt17(M.prune_threshold) << '\n';
}

PcvmModel read_pcvm_model(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_tag(in, "PCVM1", path);
  const long long k = read_int(in, path);
  if (k < 0) throw validation_error("malformed " + path + ": negative count");
  PcvmModel M;
  M.active.resize(static_cast<std::size_t>(k));
  for (auto& i : M.active) i = static_cast<Index>(read_int(in, path));
  M.weights.resize(static_cast<Index>(k));
  for (Index i = 0; i < M.weights.size(); ++i) M.weights[i] = read_double(in, path);
  M.basis_labels.resize(static_cast<std::size_t>(k));
  for (auto& y : M.basis_labels) y = static_cast<int>(read_int(in, path));
  M.bias = read_double(in, path);
  M.prune_threshold = read_double(in, path);
  return M;
}

void write_landmark_report(const std::string& path, const LandmarkReport& R) {
  std::ofstream out = open_out(path);
  out << "LMRK1\n";
  out << "method " << R.method << '\n';
  out << "m " << R.m << '\n';
  out << "epsilon " << fmt17(R.epsilon) << '\n';
  out << "seed " << R.seed << '\n';
  out << "smss " << fmt17(R.smss) << '\n';
  out << "classes " << R.per_class_counts.size() << '\n';
  for (const auto& [label, count] : R.per_class_counts)
    out << "class " << label << ' ' << count << '\n';
  out << "indices " << R.indices.size() << '\n';
  for (Index i : R.indices) out << i << '\n';
}

LandmarkReport read_landmark_report(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_tag(in, "LMRK1", path);
  LandmarkReport R;
  expect_tag(in, "method", path);
  if (!(in >> R.method)) throw validation_error("malformed " + path + ": missing method");
  expect_tag(in, "m", path);
  R.m = static_cast<Index>(read_int(in, path));
  expect_tag(in, "epsilon", path);
  R.epsilon = read_double_token(in, path);
  expect_tag(in, "seed", path);
  R.seed = static_cast<std::uint64_t>(read_int(in, path));
  expect_tag(in, "smss", path);
  R.smss = read_double_token(in, path);
  expect_tag(in, "classes", path);
  const long long nc = read_int(in, path);
  for (long long c = 0; c < nc; ++c) {
    expect_tag(in, "class", path);
    const int label = static_cast<int>(read_int(in, path));
    R.per_class_counts[label] = static_cast<Index>(read_int(in, path));
  }
  expect_tag(in, "indices", path);
  const long long k = read_int(in, path);
  R.indices.resize(static_cast<std::size_t>(k));
  for (auto& i : R.indices) i = static_cast<Index>(read_int(in, path));
  return R;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long long to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos;
    const long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw validation_error("spec: bad integer for '" + key + "': " + v);
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos;
    const double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw validation_error("spec: bad number for '" + key + "': " + v);
  }
}

}  // namespace

ExperimentSpec parse_spec_text(const std::string& text) {
  ExperimentSpec spec;
  bool seed_given = false, train_seed_given = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error("spec: expected 'key = value', got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw validation_error("spec: empty key or value in: " + line);

    if (key == "dataset") spec.dataset = val;
    else if (key == "kernel") spec.kernel_path = val;
    else if (key == "labels") spec.label_path = val;
    else if (key == "n") spec.n = static_cast<Index>(to_int(val, key));
    else if (key == "classifier") spec.classifier = val;
    else if (key == "selector") spec.selector = val;
    else if (key == "epsilon") spec.epsilon = to_double(val, key);
    else if (key == "m") spec.m = static_cast<Index>(to_int(val, key));
    else if (key == "folds") spec.folds = static_cast<int>(to_int(val, key));
    else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(to_int(val, key));
      seed_given = true;
    } else if (key == "output") spec.output = val;
    else if (key == "max_iters") spec.train.max_iters = static_cast<int>(to_int(val, key));
    else if (key == "prune_threshold") spec.train.prune_threshold = to_double(val, key);
    else if (key == "meb_epsilon") spec.train.meb_epsilon = to_double(val, key);
    else if (key == "upsilon_fraction") spec.train.upsilon_landmark_fraction = to_double(val, key);
    else if (key == "upsilon_cap") spec.train.upsilon_landmark_cap = static_cast<int>(to_int(val, key));
    else if (key == "small_cutoff") spec.train.small_problem_cutoff = static_cast<int>(to_int(val, key));
    else if (key == "dense_cutoff") spec.train.pcvm_dense_cutoff = static_cast<int>(to_int(val, key));
    else if (key == "train_seed") {
      spec.train.rng_seed = static_cast<std::uint64_t>(to_int(val, key));
      train_seed_given = true;
    } else throw validation_error("spec: unknown key '" + key + "'");
  }
  if (spec.dataset.empty()) {
    if (spec.kernel_path.empty()) throw validation_error("spec: dataset (or kernel file) required");
    spec.dataset = "file";
  }
  if (spec.folds < 2) throw validation_error("spec: folds must be at least 2");
  if (seed_given && !train_seed_given) spec.train.rng_seed = spec.seed;
  return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

void emit_cv_report(std::ostream& out, const CvReport& R, const ExperimentSpec& spec,
                    const std::string& base) {
  const bool nystrom = spec.classifier == "ny-ikfd" || spec.classifier == "ny-pcvm";
  char buf[64];
  auto kv = [&](const char* key, double v, const char* fmt = "%.4f") {
    std::snprintf(buf, sizeof(buf), fmt, v);
    out << key << " = " << buf << '\n';
  };
  out << "dataset = " << spec.dataset << '\n';
  out << "classifier = " << spec.classifier << '\n';
  if (nystrom) out << "selector = " << spec.selector << '\n';
  out << "folds = " << spec.folds << '\n';
  out << "seed = " << spec.seed << '\n';
  kv("mean_accuracy", R.mean_accuracy);
  kv("std_accuracy", R.std_accuracy);
  if (!std::isnan(R.mean_landmarks)) kv("mean_landmarks", R.mean_landmarks, "%.2f");
  if (!std::isnan(R.mean_smss)) kv("mean_smss", R.mean_smss, "%.6f");
  if (!std::isnan(R.sparsity_percent)) kv("sparsity_percent", R.sparsity_percent, "%.2f");
  double total = 0.0;
  for (double s : R.fold_seconds) total += s;
  kv("total_seconds", total, "%.6f");
  for (std::size_t f = 0; f < R.fold_accuracy.size(); ++f) {
    std::snprintf(buf, sizeof(buf), "fold_%zu", f);
    std::string key(buf);
    std::snprintf(buf, sizeof(buf), "%.4f", R.fold_accuracy[f]);
    out << key << " = " << buf << '\n';
  }

  if (base.empty()) return;

  nlohmann::json j;
  j["spec"] = {{"dataset", spec.dataset}, {"classifier", spec.classifier},
               {"selector", spec.selector}, {"epsilon", spec.epsilon},
               {"m", spec.m},             {"folds", spec.folds},
               {"seed", spec.seed},       {"n", spec.n}};
  j["mean_accuracy"] = R.mean_accuracy;
  j["std_accuracy"] = R.std_accuracy;
  j["fold_accuracy"] = R.fold_accuracy;
  j["fold_seconds"] = R.fold_seconds;
  if (!std::isnan(R.mean_landmarks)) j["mean_landmarks"] = R.mean_landmarks;
  if (!std::isnan(R.mean_smss)) j["mean_smss"] = R.mean_smss;
  if (!std::isnan(R.sparsity_percent)) j["sparsity_percent"] = R.sparsity_percent;
  open_out(base + ".json") << j.dump(2) << '\n';

  std::ofstream csv = open_out(base + ".csv");
  csv << "fold,accuracy,seconds\n";
  for (std::size_t f = 0; f < R.fold_accuracy.size(); ++f) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g", f, R.fold_accuracy[f], R.fold_seconds[f]);
    csv << buf << '\n';
  }
}

}  // namespace nyk
