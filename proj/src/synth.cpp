#include "adnms/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "adnms/density.hpp"
#include "adnms/error.hpp"
#include "adnms/io.hpp"
#include "adnms/parallel.hpp"
#include "adnms/random.hpp"

namespace adnms {

namespace {

constexpr int kPlacementAttempts = 100;
constexpr int kJitterAttempts = 20;
constexpr double kMinProposalSide = 1.0;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

double quantize_score(double s) { return std::round(s * 1e6) / 1e6; }

bool fits_with(const BoundingBox& b, const std::vector<GroundTruthObject>& placed) {
  return std::all_of(placed.begin(), placed.end(), [&](const GroundTruthObject& o) {
    return iou(b, o.box) <= kMaxIncidentalIou;
  });
}

BoundingBox quantized_box(double x1, double y1, double x2, double y2) {
  return BoundingBox(quantize_coord(x1), quantize_coord(y1), quantize_coord(x2),
                     quantize_coord(y2));
}

}  // namespace

double quantize_coord(double v) { return std::round(v * 100.0) / 100.0; }

void SceneParams::validate() const {
  if (!finite_positive(image_width) || !finite_positive(image_height)) {
    throw ConfigError("image size must be positive");
  }
  if (!(persons_per_image >= 0.0) || !(crowd_pair_rate >= 0.0) || !(ignore_region_rate >= 0.0)) {
    throw ConfigError("scene rates must be >= 0");
  }
  if (!(min_height >= 50.0)) throw ConfigError("min_height must be >= 50");
  if (!(max_height >= min_height)) throw ConfigError("max_height must be >= min_height");
  if (!(max_height <= image_height)) throw ConfigError("max_height exceeds the image height");
  if (!finite_positive(aspect_ratio)) throw ConfigError("aspect_ratio must be positive");
}

SceneParams SceneParams::citypersons() {
  SceneParams p;
  p.image_width = 2048.0;
  p.image_height = 1024.0;
  p.persons_per_image = 6.47;
  p.crowd_pair_rate = 0.32;
  p.min_height = 50.0;
  p.max_height = 350.0;
  p.ignore_region_rate = 1.0;
  return p;
}

SceneParams SceneParams::crowdhuman() {
  SceneParams p;
  p.image_width = 1600.0;
  p.image_height = 1200.0;
  p.persons_per_image = 22.64;
  p.crowd_pair_rate = 2.40;
  p.min_height = 50.0;
  p.max_height = 400.0;
  return p;
}

void DetectorParams::validate() const {
  if (!(localization_noise >= 0.0) || !std::isfinite(localization_noise)) {
    throw ConfigError("localization_noise must be >= 0");
  }
  if (duplicate_count < 1) throw ConfigError("duplicate_count must be >= 1");
  if (!(fp_rate >= 0.0)) throw ConfigError("fp_rate must be >= 0");
  if (!(score_spread >= 0.0) || !(score_noise >= 0.0) || !(score_alpha >= 0.0)) {
    throw ConfigError("score model terms must be >= 0");
  }
  if (!(fp_score_min >= 0.0 && fp_score_min <= fp_score_max && fp_score_max <= 1.0)) {
    throw ConfigError("false-positive score range must satisfy 0 <= min <= max <= 1");
  }
  if (!finite_positive(fp_min_height) || !(fp_max_height >= fp_min_height) ||
      !finite_positive(fp_aspect_ratio)) {
    throw ConfigError("false-positive box shape is invalid");
  }
}

Scene generate_scene(const SceneParams& params) {
  params.validate();
  Rng rng(params.seed);
  const double W = params.image_width;
  const double H = params.image_height;

  const unsigned n_pairs = rng.poisson(params.crowd_pair_rate);
  const unsigned n_singles =
      rng.poisson(std::max(0.0, params.persons_per_image - 2.0 * params.crowd_pair_rate));

  Scene scene;
  scene.width = W;
  scene.height = H;
  auto& placed = scene.objects;

  for (unsigned p = 0; p < n_pairs; ++p) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const double h = rng.uniform(params.min_height, params.max_height);
      const double w = params.aspect_ratio * h;
      const double target = rng.uniform_open(kPairIouLow, kPairIouHigh);
      // Two equal boxes shifted horizontally by dx have IoU (w - dx) / (w + dx).
      const double dx = w * (1.0 - target) / (1.0 + target);
      const double x = rng.uniform(0.0, W - (w + dx));
      const double y = rng.uniform(0.0, H - h);
      if (x < 0.0) continue;
      const BoundingBox left = quantized_box(x, y, x + w, y + h);
      const BoundingBox right = quantized_box(x + dx, y, x + dx + w, y + h);
      const double pair_iou = iou(left, right);
      if (!(pair_iou > kPairIouLow && pair_iou < kPairIouHigh)) continue;
      if (!fits_with(left, placed) || !fits_with(right, placed)) continue;
      placed.push_back({left, false, 0.0});
      placed.push_back({right, false, 0.0});
      break;
    }
  }

  for (unsigned s = 0; s < n_singles; ++s) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const double h = rng.uniform(params.min_height, params.max_height);
      const double w = params.aspect_ratio * h;
      const double x = rng.uniform(0.0, W - w);
      const double y = rng.uniform(0.0, H - h);
      if (x < 0.0) continue;
      const BoundingBox box = quantized_box(x, y, x + w, y + h);
      if (!fits_with(box, placed)) continue;
      placed.push_back({box, false, 0.0});
      break;
    }
  }

  const unsigned n_ignore = rng.poisson(params.ignore_region_rate);
  for (unsigned r = 0; r < n_ignore; ++r) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const double w = rng.uniform(30.0, std::min(250.0, W));
      const double h = rng.uniform(30.0, std::min(250.0, H));
      const double x = rng.uniform(0.0, W - w);
      const double y = rng.uniform(0.0, H - h);
      const BoundingBox region = quantized_box(x, y, x + w, y + h);
      const bool clear = std::all_of(placed.begin(), placed.end(), [&](const GroundTruthObject& o) {
        return intersection_area(region, o.box) == 0.0;
      });
      if (!clear) continue;
      scene.ignore_regions.push_back(region);
      break;
    }
  }

  fill_gt_densities(scene.objects);
  return scene;
}

std::vector<Detection> simulate_detector(const Scene& scene, const DetectorParams& params) {
  params.validate();
  Rng rng(params.seed);
  const double W = scene.width;
  const double H = scene.height;
  std::vector<Detection> out;

  auto emit = [&](const BoundingBox& box, double score) {
    out.push_back({box, quantize_score(std::clamp(score, 0.0, 1.0)), std::nullopt, out.size()});
  };

  for (const auto& gt : scene.objects) {
    if (gt.ignore) continue;
    const double object_score = rng.uniform(params.score_base - params.score_spread, params.score_base);
    const double w = gt.box.width();
    const double h = gt.box.height();
    const double cx = 0.5 * (gt.box.x1() + gt.box.x2());
    const double cy = 0.5 * (gt.box.y1() + gt.box.y2());
    for (int k = 0; k < params.duplicate_count; ++k) {
      std::optional<BoundingBox> proposal;
      for (int attempt = 0; attempt < kJitterAttempts && !proposal; ++attempt) {
        const double s = params.localization_noise;
        const double jcx = cx + rng.normal() * s * w;
        const double jcy = cy + rng.normal() * s * h;
        const double jw = w * std::exp(rng.normal() * s);
        const double jh = h * std::exp(rng.normal() * s);
        const double x1 = quantize_coord(std::max(0.0, jcx - 0.5 * jw));
        const double y1 = quantize_coord(std::max(0.0, jcy - 0.5 * jh));
        const double x2 = quantize_coord(std::min(W, jcx + 0.5 * jw));
        const double y2 = quantize_coord(std::min(H, jcy + 0.5 * jh));
        if (x2 - x1 >= kMinProposalSide && y2 - y1 >= kMinProposalSide) {
          proposal.emplace(x1, y1, x2, y2);
        }
      }
      const BoundingBox box = proposal.value_or(gt.box);
      const double eps = rng.uniform(-params.score_noise, params.score_noise);
      emit(box, object_score - params.score_alpha * (1.0 - iou(box, gt.box)) + eps);
    }
  }

  const unsigned n_fp = rng.poisson(params.fp_rate);
  for (unsigned f = 0; f < n_fp; ++f) {
    const double h = std::min(H, rng.uniform(params.fp_min_height, params.fp_max_height));
    const double w = std::min(W, params.fp_aspect_ratio * h);
    const double x = rng.uniform(0.0, W - w);
    const double y = rng.uniform(0.0, H - h);
    const double score = rng.uniform(params.fp_score_min, params.fp_score_max);
    emit(BoundingBox(quantize_coord(x), quantize_coord(y), quantize_coord(x + w), quantize_coord(y + h)),
         score);
  }
  return out;
}

std::string synthetic_image_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%06zu", index);
  return buf;
}

std::vector<SyntheticImage> make_dataset(std::size_t n_images, const SceneParams& scene,
                                         const DetectorParams& detector, unsigned jobs) {
  scene.validate();
  detector.validate();
  std::vector<SyntheticImage> images(n_images);
  parallel_for(n_images, jobs, [&](std::size_t i) {
    SceneParams sp = scene;
    sp.seed = derive_seed(scene.seed, kSceneStream, i);
    DetectorParams dp = detector;
    dp.seed = derive_seed(detector.seed, kDetectorStream, i);
    images[i].image_id = synthetic_image_id(i);
    images[i].scene = generate_scene(sp);
    images[i].detections = simulate_detector(images[i].scene, dp);
  });
  return images;
}

void generate_dataset(const std::filesystem::path& dir, std::size_t n_images,
                      const SceneParams& scene, const DetectorParams& detector, unsigned jobs) {
  const auto images = make_dataset(n_images, scene, detector, jobs);
  AnnotationMap annotations;
  DetectionMap detections;
  for (const auto& img : images) {
    annotations.emplace(img.image_id, to_annotation(img.scene));
    detections.emplace(img.image_id, img.detections);
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": " + ec.message());
  write_annotations(dir / "annotations.jsonl", annotations);
  write_detections(dir / "detections.jsonl", detections);
}

}  // namespace adnms
