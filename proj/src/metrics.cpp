#include "gmap/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gmap {

namespace {

// Per-frame, per-category matching state reused across thresholds.
struct CategoryMatrix {
  std::vector<int> pred_order;       // pred element indices, score-descending
  std::vector<double> pred_scores;   // aligned with pred_order
  int gt_count = 0;
  std::vector<double> chamfer;       // pred_order.size() x gt_count
};

CategoryMatrix BuildCategoryMatrix(const VectorMap& pred, const VectorMap& gt,
                                   Category cat) {
  CategoryMatrix m;
  std::vector<int> gt_idx;
  for (int i = 0; i < static_cast<int>(pred.elements.size()); ++i) {
    if (pred.elements[i].category == cat) m.pred_order.push_back(i);
  }
  for (int i = 0; i < static_cast<int>(gt.elements.size()); ++i) {
    if (gt.elements[i].category == cat) gt_idx.push_back(i);
  }
  std::stable_sort(m.pred_order.begin(), m.pred_order.end(), [&](int a, int b) {
    if (pred.elements[a].score != pred.elements[b].score) {
      return pred.elements[a].score > pred.elements[b].score;
    }
    return pred.elements[a].id < pred.elements[b].id;
  });
  m.gt_count = static_cast<int>(gt_idx.size());
  m.chamfer.resize(m.pred_order.size() * gt_idx.size());
  for (std::size_t r = 0; r < m.pred_order.size(); ++r) {
    for (std::size_t c = 0; c < gt_idx.size(); ++c) {
      m.chamfer[r * gt_idx.size() + c] =
          ChamferDistance(pred.elements[m.pred_order[r]].geometry,
                          gt.elements[gt_idx[c]].geometry);
    }
  }
  for (int r : m.pred_order) m.pred_scores.push_back(pred.elements[r].score);
  return m;
}

// Greedy one-to-one claiming at a given threshold.
void MatchAtThreshold(const CategoryMatrix& m, Category cat, double threshold,
                      int frame_index, std::vector<Detection>* out) {
  std::vector<char> claimed(m.gt_count, false);
  for (std::size_t r = 0; r < m.pred_order.size(); ++r) {
    double best = std::numeric_limits<double>::infinity();
    int best_gt = -1;
    for (int c = 0; c < m.gt_count; ++c) {
      if (claimed[c]) continue;
      const double d = m.chamfer[r * m.gt_count + c];
      if (d < best) {
        best = d;
        best_gt = c;
      }
    }
    Detection det;
    det.score = m.pred_scores[r];
    det.category = cat;
    det.frame_index = frame_index;
    det.is_tp = best_gt >= 0 && best < threshold;
    if (det.is_tp) claimed[best_gt] = true;
    out->push_back(det);
  }
}

}  // namespace

FrameMatch MatchFrameDetections(const VectorMap& pred, const VectorMap& gt,
                                double threshold, int frame_index) {
  if (pred.frame != gt.frame) {
    throw std::invalid_argument(
        "MatchFrameDetections: maps must share a frame");
  }
  FrameMatch out;
  for (Category cat : kAllCategories) {
    const CategoryMatrix m = BuildCategoryMatrix(pred, gt, cat);
    out.gt_count[static_cast<int>(cat)] = m.gt_count;
    MatchAtThreshold(m, cat, threshold, frame_index, &out.detections);
  }
  return out;
}

PrCurve ComputePrCurve(std::vector<Detection> dets, int gt_count) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.is_tp != b.is_tp) return a.is_tp;
                     return a.frame_index < b.frame_index;
                   });
  PrCurve curve;
  curve.gt_count = gt_count;
  int tp = 0;
  int seen = 0;
  for (const Detection& d : dets) {
    ++seen;
    if (d.is_tp) ++tp;
    const double precision = static_cast<double>(tp) / seen;
    const double recall =
        gt_count > 0 ? static_cast<double>(tp) / gt_count : 0.0;
    curve.points.emplace_back(recall, precision);
  }
  return curve;
}

double Auc(const PrCurve& curve) {
  if (curve.points.empty()) return 0.0;
  // Precision envelope over distinct recalls, stepped from recall 0.
  std::vector<std::pair<double, double>> pts = curve.points;
  std::sort(pts.begin(), pts.end());
  // For each distinct recall, p*(r) = max precision among points with
  // recall >= r; sweep from the right.
  std::vector<std::pair<double, double>> envelope;  // (recall, p*)
  double running_max = 0.0;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    running_max = std::max(running_max, it->second);
    if (envelope.empty() || envelope.back().first != it->first) {
      envelope.emplace_back(it->first, running_max);
    } else {
      envelope.back().second = running_max;
    }
  }
  std::reverse(envelope.begin(), envelope.end());
  double area = 0.0;
  double prev_recall = 0.0;
  for (const auto& [recall, p_star] : envelope) {
    area += (recall - prev_recall) * p_star;
    prev_recall = recall;
  }
  return area;
}

namespace {

EvalReport BuildReport(
    const std::vector<double>& thresholds,
    const std::array<std::map<double, std::vector<Detection>>, kCategoryCount>&
        pooled,
    const std::array<int, kCategoryCount>& gt_totals, bool as_gap) {
  EvalReport report;
  report.thresholds = thresholds;
  double sum = 0.0;
  int evaluated = 0;
  for (int c = 0; c < kCategoryCount; ++c) {
    CategoryResult res;
    bool any_dets = false;
    double acc = 0.0;
    for (double thr : thresholds) {
      const auto& dets = pooled[c].at(thr);
      if (!dets.empty()) any_dets = true;
      const double ap = Auc(ComputePrCurve(dets, gt_totals[c]));
      res.ap_per_threshold[thr] = ap;
      acc += ap;
    }
    res.mean_ap = thresholds.empty() ? 0.0 : acc / thresholds.size();
    res.evaluated = gt_totals[c] > 0 || any_dets;
    if (res.evaluated) {
      sum += res.mean_ap;
      ++evaluated;
    }
    (as_gap ? report.gap : report.ap)[c] = res;
  }
  if (evaluated > 0) {
    (as_gap ? report.gap_mean : report.map_mean) = sum / evaluated;
  }
  return report;
}

}  // namespace

EvalReport ApStream(const std::vector<VectorMap>& preds,
                    const std::vector<VectorMap>& gts,
                    const std::vector<double>& thresholds) {
  if (preds.size() != gts.size()) {
    throw std::invalid_argument("ApStream: frame lists differ in length");
  }
  std::array<std::map<double, std::vector<Detection>>, kCategoryCount> pooled;
  for (int c = 0; c < kCategoryCount; ++c) {
    for (double thr : thresholds) pooled[c][thr] = {};
  }
  std::array<int, kCategoryCount> gt_totals = {0, 0, 0};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (Category cat : kAllCategories) {
      const int c = static_cast<int>(cat);
      const CategoryMatrix m = BuildCategoryMatrix(preds[i], gts[i], cat);
      gt_totals[c] += m.gt_count;
      for (double thr : thresholds) {
        MatchAtThreshold(m, cat, thr, static_cast<int>(i), &pooled[c][thr]);
      }
    }
  }
  return BuildReport(thresholds, pooled, gt_totals, /*as_gap=*/false);
}

EvalReport GapMap(const VectorMap& pred_global, const VectorMap& gt_global,
                  const std::vector<double>& thresholds) {
  if (pred_global.frame != Frame::kGlobal ||
      gt_global.frame != Frame::kGlobal) {
    throw std::invalid_argument("GapMap: maps must be in the global frame");
  }
  std::array<std::map<double, std::vector<Detection>>, kCategoryCount> pooled;
  for (int c = 0; c < kCategoryCount; ++c) {
    for (double thr : thresholds) pooled[c][thr] = {};
  }
  std::array<int, kCategoryCount> gt_totals = {0, 0, 0};
  for (Category cat : kAllCategories) {
    const int c = static_cast<int>(cat);
    const CategoryMatrix m = BuildCategoryMatrix(pred_global, gt_global, cat);
    gt_totals[c] = m.gt_count;
    for (double thr : thresholds) {
      MatchAtThreshold(m, cat, thr, 0, &pooled[c][thr]);
    }
  }
  return BuildReport(thresholds, pooled, gt_totals, /*as_gap=*/true);
}

EvalReport CombineReports(const EvalReport& ap_part,
                          const EvalReport& gap_part) {
  EvalReport out = ap_part;
  out.gap = gap_part.gap;
  out.gap_mean = gap_part.gap_mean;
  return out;
}

}  // namespace gmap
