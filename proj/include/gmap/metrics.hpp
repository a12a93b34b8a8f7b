#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmap/map_model.hpp"

namespace gmap {

struct Detection {
  double score = 0.0;
  bool is_tp = false;
  Category category = Category::kRoadBoundary;
  int frame_index = 0;  // 0 for global-map evaluation
};

struct PrCurve {
  // Cumulative (recall, precision) at each rank, recalls non-decreasing.
  std::vector<std::pair<double, double>> points;
  int gt_count = 0;
};

struct FrameMatch {
  std::vector<Detection> detections;
  std::array<int, kCategoryCount> gt_count = {0, 0, 0};
};

struct CategoryResult {
  std::map<double, double> ap_per_threshold;
  double mean_ap = 0.0;
  bool evaluated = false;  // false when the category had no GT and no preds
};

struct EvalReport {
  std::array<CategoryResult, kCategoryCount> ap;    // per-frame AP
  std::array<CategoryResult, kCategoryCount> gap;   // global-map AP
  std::optional<double> map_mean;   // mAP over evaluated categories
  std::optional<double> gap_mean;   // mGAP over evaluated categories
  std::vector<double> thresholds;
  int chamfer_samples = kChamferSampleCount;
};

// Greedy score-ordered matching of predictions to ground truth per category:
// each prediction claims the unclaimed GT element with the smallest Chamfer
// distance if below the threshold (TP), else it is an FP.
FrameMatch MatchFrameDetections(const VectorMap& pred, const VectorMap& gt,
                                double threshold, int frame_index = 0);

PrCurve ComputePrCurve(std::vector<Detection> dets, int gt_count);

// Area under the precision envelope p*(r) = max precision at recall >= r,
// summed over distinct recall steps from 0.
double Auc(const PrCurve& curve);

// AP over an aligned stream of (pred, gt) local maps: detections are pooled
// across frames per threshold, one AUC per category and threshold.
EvalReport ApStream(const std::vector<VectorMap>& preds,
                    const std::vector<VectorMap>& gts,
                    const std::vector<double>& thresholds);

// GAP over a single global map pair; fills the `gap` side of the report.
EvalReport GapMap(const VectorMap& pred_global, const VectorMap& gt_global,
                  const std::vector<double>& thresholds);

// Merges the AP part of `ap_part` and the GAP part of `gap_part`.
EvalReport CombineReports(const EvalReport& ap_part,
                          const EvalReport& gap_part);

inline const std::vector<double>& DefaultThresholds() {
  static const std::vector<double> kThresholds = {0.5, 1.0, 1.5};
  return kThresholds;
}

}  // namespace gmap
