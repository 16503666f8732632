#include "jointgraph/evaluate.hpp"

#include <algorithm>
#include <string>

#include "jointgraph/errors.hpp"

namespace jointgraph {

RateSummary afpr_atpr(const std::vector<EdgeSet>& truth, const std::vector<EdgeSet>& estimates,
                      int p) {
  if (truth.size() != estimates.size()) throw InputError("afpr_atpr: group count mismatch");
  if (truth.empty()) throw InputError("afpr_atpr: no groups");
  const long long pairs = pair_count(p);

  RateSummary out;
  double fpr_sum = 0.0, tpr_sum = 0.0;
  int fpr_groups = 0, tpr_groups = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    long long tp = 0, fp = 0;
    for (const Edge& e : estimates[k]) {
      if (e.first < 1 || e.second > p || e.first >= e.second) {
        throw InputError("afpr_atpr: estimated edge outside 1..p");
      }
      if (truth[k].count(e)) ++tp; else ++fp;
    }
    const long long positives = static_cast<long long>(truth[k].size());
    const long long negatives = pairs - positives;
    if (positives > 0) {
      tpr_sum += static_cast<double>(tp) / static_cast<double>(positives);
      ++tpr_groups;
    } else {
      out.warnings.push_back("group " + std::to_string(k + 1) + " has no true edges; ATPR undefined");
    }
    if (negatives > 0) {
      fpr_sum += static_cast<double>(fp) / static_cast<double>(negatives);
      ++fpr_groups;
    } else {
      out.warnings.push_back("group " + std::to_string(k + 1) + " has no true non-edges; AFPR undefined");
    }
  }
  if (fpr_groups > 0) out.afpr = fpr_sum / fpr_groups;
  if (tpr_groups > 0) out.atpr = tpr_sum / tpr_groups;
  return out;
}

std::vector<double> lambda_grid() {
  std::vector<double> grid;
  grid.reserve(100);
  for (int i = 0; i < 90; ++i) grid.push_back(0.67 * i / 89.0);
  for (int i = 0; i < 10; ++i) grid.push_back(0.6784 + (1.5 - 0.6784) * i / 9.0);
  grid[89] = 0.67;
  grid[99] = 1.5;
  return grid;
}

double roc_auc(std::vector<RocPoint> points) {
  points.push_back({0.0, 0.0, 0.0});
  points.push_back({0.0, 1.0, 1.0});
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.afpr != b.afpr ? a.afpr < b.afpr : a.atpr < b.atpr;
  });
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].afpr - points[i - 1].afpr) * 0.5 * (points[i].atpr + points[i - 1].atpr);
  }
  return std::clamp(area, 0.0, 1.0);
}

namespace {

struct Accumulator {
  std::vector<double> afpr, atpr;
  std::vector<int> afpr_n, atpr_n;
  explicit Accumulator(std::size_t g) : afpr(g, 0.0), atpr(g, 0.0), afpr_n(g, 0), atpr_n(g, 0) {}
};

}  // namespace

RocCurve roc_from_sweeps(const std::vector<std::vector<EdgeSet>>& truths, int p,
                         const std::vector<std::vector<std::vector<EdgeSet>>>& sweeps,
                         std::span<const double> grid) {
  if (sweeps.size() != truths.size()) throw InputError("roc: replicate count mismatch");
  RocCurve curve;
  Accumulator acc(grid.size());
  for (std::size_t r = 0; r < truths.size(); ++r) {
    if (sweeps[r].size() != grid.size()) throw InputError("roc: sweep length mismatch");
    std::vector<RocPoint> own;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const RateSummary rates = afpr_atpr(truths[r], sweeps[r][g], p);
      if (!rates.afpr || !rates.atpr) continue;
      acc.afpr[g] += *rates.afpr;
      acc.atpr[g] += *rates.atpr;
      ++acc.afpr_n[g];
      ++acc.atpr_n[g];
      own.push_back({grid[g], *rates.afpr, *rates.atpr});
    }
    curve.replicate_auc.push_back(roc_auc(own));
    ++curve.replicates;
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (acc.afpr_n[g] == 0) continue;
    curve.points.push_back({grid[g], acc.afpr[g] / acc.afpr_n[g], acc.atpr[g] / acc.atpr_n[g]});
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const RocPoint& a, const RocPoint& b) { return a.lambda < b.lambda; });
  curve.auc = roc_auc(curve.points);
  return curve;
}

RocCurve roc(const std::vector<std::vector<EdgeSet>>& truths, int p, const SweepFitter& fitter,
             std::span<const double> grid) {
  std::vector<std::vector<EdgeSet>> kept_truths;
  std::vector<std::vector<std::vector<EdgeSet>>> sweeps;
  std::vector<std::string> failures;
  for (std::size_t r = 0; r < truths.size(); ++r) {
    std::vector<std::vector<EdgeSet>> sweep;
    try {
      for (double lambda : grid) sweep.push_back(fitter(static_cast<int>(r), lambda));
    } catch (const std::exception& e) {
      failures.push_back("replicate " + std::to_string(r) + ": " + e.what());
      continue;
    }
    kept_truths.push_back(truths[r]);
    sweeps.push_back(std::move(sweep));
  }
  RocCurve curve = roc_from_sweeps(kept_truths, p, sweeps, grid);
  curve.failures = std::move(failures);
  return curve;
}

}  // namespace jointgraph
