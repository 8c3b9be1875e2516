#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adnms/detection.hpp"

namespace adnms {

struct LabeledDetection {
  double score = 0.0;
  bool is_tp = false;

  bool operator==(const LabeledDetection&) const = default;
};

// Outcome of matching one image. `labeled` holds only detections that were
// counted (TP or FP) in descending score order; detections absorbed by an
// ignore region are dropped. The gt_* vectors cover non-ignored objects.
struct ImageEvalRecord {
  std::string image_id;
  std::vector<LabeledDetection> labeled;
  std::size_t num_gt = 0;
  std::vector<bool> gt_matched_flags;
  std::vector<double> gt_densities;
  std::vector<double> gt_heights;
};

struct CurvePoint {
  double fppi = 0.0;
  double miss_rate = 1.0;

  bool operator==(const CurvePoint&) const = default;
};

inline constexpr std::size_t kDensityBins = 5;
inline constexpr double kDefaultMatchIou = 0.5;
inline constexpr double kIgnoreIoa = 0.5;
inline constexpr double kMinBinHeight = 50.0;
inline constexpr double kMissRateFloor = 1e-10;

using BinnedMr2 = std::array<std::optional<double>, kDensityBins>;

struct EvalReport {
  double mr2 = 1.0;
  double ap = 0.0;
  double recall = 0.0;
  std::vector<CurvePoint> curve;
  BinnedMr2 bin_mr2;
  std::size_t num_images = 0;
  std::size_t num_gt = 0;
  std::size_t num_tp = 0;
  std::size_t num_fp = 0;
};

// Everything needed to evaluate one image.
struct ImageEvalInput {
  std::string image_id;
  std::vector<GroundTruthObject> gts;
  std::vector<BoundingBox> ignore_regions;
  std::vector<Detection> dets;
};

/// Score-greedy single-assignment matching of one image.
ImageEvalRecord match_detections(std::span<const Detection> dets,
                                 std::span<const GroundTruthObject> gts,
                                 std::span<const BoundingBox> ignore_regions,
                                 double iou_thresh = kDefaultMatchIou);

/// Pooled (fppi, miss rate) operating points, one per distinct score,
/// ascending in fppi. With no counted detections at all the single point
/// (0, 1) is returned. Throws InputError when there are no images or no GT.
std::vector<CurvePoint> fppi_missrate_curve(std::span<const ImageEvalRecord> records);

/// Log-average miss rate over 9 log-spaced FPPI references in [1e-2, 1e0].
double log_average_miss_rate(std::span<const CurvePoint> curve);

/// All-points interpolated average precision of the pooled detections.
double average_precision(std::span<const ImageEvalRecord> records);

/// Fraction of non-ignored GT matched by any counted detection.
double total_recall(std::span<const ImageEvalRecord> records);

/// Bin index for a density: (-inf,0.4], (0.4,0.5], (0.5,0.6], (0.6,0.7], (0.7,1].
std::size_t density_bin(double density);

/// MR^-2 per density bin. GT outside the bin or shorter than 50 px is turned
/// into ignored GT, so detections on it are neither rewarded nor penalised.
/// Bins without any GT are reported as absent.
BinnedMr2 density_binned_report(std::span<const ImageEvalInput> images,
                                double iou_thresh = kDefaultMatchIou, unsigned jobs = 1);

struct EvalOptions {
  double iou_thresh = kDefaultMatchIou;
  bool bins = false;
  unsigned jobs = 1;
};

/// Full report over a set of images. Per-image matching may run on `jobs`
/// threads; the reduction is always in input order.
EvalReport evaluate(std::span<const ImageEvalInput> images, const EvalOptions& options = {});

}  // namespace adnms
