#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jointgraph/edges.hpp"

namespace jointgraph {

struct RocPoint {
  double lambda = 0.0;
  double afpr = 0.0;
  double atpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // sorted by lambda
  double auc = 0.0;
  int replicates = 0;
  std::vector<double> replicate_auc;
  std::vector<std::string> failures;  // one message per aborted replicate
};

/// Group-averaged false and true positive rates over the pairs j < l.
/// A rate is missing when no group has a defined denominator; groups with an
/// undefined denominator are left out of the average (see `warnings`).
struct RateSummary {
  std::optional<double> afpr;
  std::optional<double> atpr;
  std::vector<std::string> warnings;
};

RateSummary afpr_atpr(const std::vector<EdgeSet>& truth, const std::vector<EdgeSet>& estimates,
                      int p);

/// 90 points on [0, 0.67] followed by 10 on [0.6784, 1.5], both endpoint-inclusive.
std::vector<double> lambda_grid();

/// Trapezoidal area under (afpr, atpr) after sorting by afpr and adding the
/// (0, 0) and (1, 1) anchors; clamped to [0, 1].
double roc_auc(std::vector<RocPoint> points);

/// Maps (replicate, lambda) to K estimated edge sets.
using SweepFitter = std::function<std::vector<EdgeSet>(int replicate, double lambda)>;

/// Pointwise-in-lambda average of AFPR/ATPR across replicates, then AUC.
/// `truths[r]` holds the K true edge sets of replicate r. A fitter exception
/// aborts that replicate only and is recorded in `failures`.
RocCurve roc(const std::vector<std::vector<EdgeSet>>& truths, int p, const SweepFitter& fitter,
             std::span<const double> grid);

/// Same averaging, from per-replicate precomputed sweeps:
/// sweeps[r][g] = K edge sets at grid[g].
RocCurve roc_from_sweeps(const std::vector<std::vector<EdgeSet>>& truths, int p,
                         const std::vector<std::vector<std::vector<EdgeSet>>>& sweeps,
                         std::span<const double> grid);

}  // namespace jointgraph
