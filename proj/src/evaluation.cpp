#include "adnms/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adnms/error.hpp"
#include "adnms/parallel.hpp"

namespace adnms {

ImageEvalRecord match_detections(std::span<const Detection> dets,
                                 std::span<const GroundTruthObject> gts,
                                 std::span<const BoundingBox> ignore_regions, double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh < 1.0)) throw ConfigError("iou_thresh must be in (0, 1)");

  ImageEvalRecord rec;
  std::vector<std::size_t> active;  // indices of non-ignored GT
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (gts[g].ignore) continue;
    active.push_back(g);
    rec.gt_densities.push_back(gts[g].density);
    rec.gt_heights.push_back(gts[g].height());
  }
  rec.num_gt = active.size();
  rec.gt_matched_flags.assign(active.size(), false);

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].source_index < dets[b].source_index;
  });

  for (const std::size_t di : order) {
    const BoundingBox& box = dets[di].box;
    double best = iou_thresh;
    std::optional<std::size_t> match;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (rec.gt_matched_flags[k]) continue;
      const double o = iou(box, gts[active[k]].box);
      if (o >= best && (!match || o > best)) {
        best = o;
        match = k;
      }
    }
    if (match) {
      rec.gt_matched_flags[*match] = true;
      rec.labeled.push_back({dets[di].score, true});
      continue;
    }
    bool ignored = std::any_of(ignore_regions.begin(), ignore_regions.end(),
                               [&](const BoundingBox& r) { return ioa(box, r) >= kIgnoreIoa; });
    ignored = ignored || std::any_of(gts.begin(), gts.end(), [&](const GroundTruthObject& g) {
                return g.ignore && ioa(box, g.box) >= kIgnoreIoa;
              });
    if (!ignored) rec.labeled.push_back({dets[di].score, false});
  }
  return rec;
}

namespace {

struct Totals {
  std::size_t images = 0;
  std::size_t gt = 0;
};

Totals totals(std::span<const ImageEvalRecord> records) {
  Totals t;
  t.images = records.size();
  for (const auto& r : records) t.gt += r.num_gt;
  return t;
}

// All counted detections across images, score descending, stable in
// (image order, per-image order).
std::vector<LabeledDetection> pooled(std::span<const ImageEvalRecord> records) {
  std::vector<LabeledDetection> all;
  for (const auto& r : records) all.insert(all.end(), r.labeled.begin(), r.labeled.end());
  std::stable_sort(all.begin(), all.end(), [](const LabeledDetection& a, const LabeledDetection& b) {
    return a.score > b.score;
  });
  return all;
}

}  // namespace

std::vector<CurvePoint> fppi_missrate_curve(std::span<const ImageEvalRecord> records) {
  const Totals t = totals(records);
  if (t.images == 0) throw InputError("miss-rate curve needs at least one image");
  if (t.gt == 0) throw InputError("miss-rate curve needs at least one ground-truth object");

  const auto all = pooled(records);
  const double n_images = static_cast<double>(t.images);
  const double n_gt = static_cast<double>(t.gt);

  std::vector<CurvePoint> curve;
  if (all.empty()) {
    curve.push_back({0.0, 1.0});
    return curve;
  }
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double s = all[i].score;
    for (; i < all.size() && all[i].score == s; ++i) {
      if (all[i].is_tp) {
        ++tp;
      } else {
        ++fp;
      }
    }
    double miss = 1.0 - static_cast<double>(tp) / n_gt;
    if (!curve.empty()) miss = std::min(miss, curve.back().miss_rate);
    curve.push_back({static_cast<double>(fp) / n_images, miss});
  }
  return curve;
}

double log_average_miss_rate(std::span<const CurvePoint> curve) {
  if (curve.empty()) throw InputError("log-average miss rate of an empty curve");
  constexpr int kRefs = 9;
  double log_sum = 0.0;
  for (int k = 0; k < kRefs; ++k) {
    const double ref = std::pow(10.0, -2.0 + 0.25 * k);
    double miss = 1.0;
    for (const auto& p : curve) {
      if (p.fppi <= ref) {
        miss = p.miss_rate;
      } else {
        break;
      }
    }
    log_sum += std::log(std::max(miss, kMissRateFloor));
  }
  return std::exp(log_sum / kRefs);
}

double average_precision(std::span<const ImageEvalRecord> records) {
  const Totals t = totals(records);
  if (t.gt == 0) throw InputError("average precision needs at least one ground-truth object");
  const auto all = pooled(records);
  if (all.empty()) return 0.0;

  std::vector<double> precision(all.size());
  std::vector<double> recall(all.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].is_tp) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(t.gt);
  }
  for (std::size_t i = all.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

double total_recall(std::span<const ImageEvalRecord> records) {
  std::size_t gt = 0;
  std::size_t matched = 0;
  for (const auto& r : records) {
    gt += r.num_gt;
    matched += static_cast<std::size_t>(std::count(r.gt_matched_flags.begin(), r.gt_matched_flags.end(), true));
  }
  if (gt == 0) throw InputError("recall needs at least one ground-truth object");
  return static_cast<double>(matched) / static_cast<double>(gt);
}

std::size_t density_bin(double density) {
  if (density <= 0.4) return 0;
  if (density <= 0.5) return 1;
  if (density <= 0.6) return 2;
  if (density <= 0.7) return 3;
  return 4;
}

BinnedMr2 density_binned_report(std::span<const ImageEvalInput> images, double iou_thresh,
                                unsigned jobs) {
  BinnedMr2 out;
  for (std::size_t bin = 0; bin < kDensityBins; ++bin) {
    std::vector<ImageEvalRecord> records(images.size());
    parallel_for(images.size(), jobs, [&](std::size_t i) {
      std::vector<GroundTruthObject> gts = images[i].gts;
      for (auto& g : gts) {
        if (g.height() < kMinBinHeight || density_bin(g.density) != bin) g.ignore = true;
      }
      records[i] = match_detections(images[i].dets, gts, images[i].ignore_regions, iou_thresh);
    });
    if (totals(records).gt == 0) continue;
    out[bin] = log_average_miss_rate(fppi_missrate_curve(records));
  }
  return out;
}

EvalReport evaluate(std::span<const ImageEvalInput> images, const EvalOptions& options) {
  std::vector<ImageEvalRecord> records(images.size());
  parallel_for(images.size(), options.jobs, [&](std::size_t i) {
    records[i] = match_detections(images[i].dets, images[i].gts, images[i].ignore_regions,
                                  options.iou_thresh);
    records[i].image_id = images[i].image_id;
  });

  EvalReport report;
  report.num_images = records.size();
  for (const auto& r : records) {
    report.num_gt += r.num_gt;
    for (const auto& l : r.labeled) {
      if (l.is_tp) {
        ++report.num_tp;
      } else {
        ++report.num_fp;
      }
    }
  }
  report.curve = fppi_missrate_curve(records);
  report.mr2 = log_average_miss_rate(report.curve);
  report.ap = average_precision(records);
  report.recall = total_recall(records);
  if (options.bins) {
    report.bin_mr2 = density_binned_report(images, options.iou_thresh, options.jobs);
  }
  return report;
}

}  // namespace adnms
