#pragma once

#include <iosfwd>
#include <string>

#include "nyk/classifiers.hpp"
#include "nyk/crossval.hpp"
#include "nyk/landmarks.hpp"

namespace nyk {

// NYK1: ASCII, header "NYK1 <n>" then n lines of n space-separated decimals.  The reader also
// accepts the rectangular extension "NYK1 <rows> <cols>" (used for test-vs-basis cross
// blocks); the writer emits the square header for square matrices.  Values use %.17g so text
// round-trips are value-exact.
MatrixXd read_nyk1(const std::string& path);
void write_nyk1(const std::string& path, const MatrixXd& M);

// NYKB: magic "NYKB", little-endian u64 n, then n*n little-endian doubles row-major.
MatrixXd read_nykb(const std::string& path);
void write_nykb(const std::string& path, const MatrixXd& M);

// Dispatch on the magic bytes.
MatrixXd read_kernel_file(const std::string& path);

// One integer per line.
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

// Versioned model files; %.17g fields, so load reproduces predictions bit-for-bit.
void write_ikfd_model(const std::string& path, const IkfdModel& M);
IkfdModel read_ikfd_model(const std::string& path);
void write_pcvm_model(const std::string& path, const PcvmModel& M);
PcvmModel read_pcvm_model(const std::string& path);

// Landmark report: method line, parameter line (eps or m), seed line, then one index per line.
void write_landmark_report(const std::string& path, const LandmarkReport& R);
LandmarkReport read_landmark_report(const std::string& path);

// ExperimentSpec file: one "key = value" per line, '#' comments allowed.
ExperimentSpec parse_spec_file(const std::string& path);
ExperimentSpec parse_spec_text(const std::string& text);

// Report emission: line-oriented key=value to `out`; when base is non-empty also writes
// <base>.json (machine-readable) and <base>.csv (per-fold rows).
void emit_cv_report(std::ostream& out, const CvReport& R, const ExperimentSpec& spec,
                    const std::string& base);

}  // namespace nyk
