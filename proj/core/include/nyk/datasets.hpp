#pragma once

#include <cstdint>

#include "nyk/proximity.hpp"

namespace nyk {

// Either vectorial points with a kernel function, or a precomputed similarity matrix
// (X empty).  Labels are +/-1 for the binary generators; multiclass data goes through
// binary_view.
struct LabeledDataset {
  MatrixXd X;               // n x d, empty when kernel-only
  std::vector<int> labels;  // size n
  KernelFunction kernel;    // used when X is non-empty
  MatrixXd K;               // materialized kernel; may be empty for large vectorial data

  Index n() const { return static_cast<Index>(labels.size()); }
  bool vectorial() const { return X.rows() > 0; }
};

// Full kernel matrix: returns the stored K or evaluates the kernel on X.
MatrixXd dataset_kernel(const LabeledDataset& d);

// Kernel block rows x cols by direct evaluation (vectorial) or sub-matrix reads.
MatrixXd dataset_kernel_block(const LabeledDataset& d, const std::vector<Index>& rows,
                              const std::vector<Index>& cols);

// Two classes of balls, radii 1.0 / 1.1, centers uniform in [0,10]^3; squared surface
// distances max(0, |ca-cb| - ra - rb)^2 double-centered into an indefinite similarity matrix.
LabeledDataset gen_ball(Index n_per_class, std::uint64_t seed);

// n uniform points on [0,3)^2, label = parity of floor(x)+floor(y), elm-arcsine kernel.
LabeledDataset gen_checkerboard(Index n, std::uint64_t seed);

// Two overlapping unit-variance 2-D Gaussians, means 2 apart, elm-arcsine kernel.
LabeledDataset gen_gauss_overlap(Index n, std::uint64_t seed);

// Two unit-variance 2-D Gaussians under the signature-(1,1) inner product x0*y0 - x1*y1.
LabeledDataset gen_pe_gaussians(Index n, std::uint64_t seed);

// 540 points in 10-D: a 500-point Gaussian dominant in dims 0,1 with low-noise dims 3..9
// (label -1), plus two 20-point clusters along dim 2 -- the one dimension the big class does
// not touch -- at offsets 1.3 and 2.6 (label +1).  Linear kernel: landmarks drawn only from
// the big class leave the small clusters with all-zero approximated rows.
LabeledDataset gen_magnification(std::uint64_t seed);

}  // namespace nyk
