#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "adnms/detection.hpp"

namespace adnms {

// Crowd scene generator parameters. Persons are drawn as Poisson singles
// plus Poisson crowd pairs, so the expected person count is
// persons_per_image and the expected number of constructed pairs with
// IoU > 0.5 is crowd_pair_rate.
struct SceneParams {
  double image_width = 1600.0;
  double image_height = 1200.0;
  double persons_per_image = 22.64;
  double crowd_pair_rate = 2.40;
  double min_height = 50.0;
  double max_height = 400.0;
  double aspect_ratio = 0.41;
  // Poisson mean of ignore regions per image.
  double ignore_region_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;

  static SceneParams citypersons();
  static SceneParams crowdhuman();
};

// Simulated detector. Each GT gets `duplicate_count` jittered proposals with
// score clamp(object_score - score_alpha * (1 - IoU(proposal, GT)) + eps),
// where object_score ~ U(score_base - score_spread, score_base) per object and
// eps ~ U(-score_noise, score_noise) per proposal. Background false
// positives arrive as Poisson(fp_rate) with scores U(fp_score_min, fp_score_max).
struct DetectorParams {
  double localization_noise = 0.04;
  int duplicate_count = 3;
  double score_base = 0.95;
  double score_spread = 0.35;
  double score_alpha = 1.0;
  double score_noise = 0.03;
  double fp_rate = 1.0;
  double fp_score_min = 0.05;
  double fp_score_max = 0.7;
  double fp_min_height = 50.0;
  double fp_max_height = 300.0;
  double fp_aspect_ratio = 0.41;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scene {
  double width = 0.0;
  double height = 0.0;
  std::vector<GroundTruthObject> objects;
  std::vector<BoundingBox> ignore_regions;
};

// Upper bound on IoU between a placed object and anything but its own
// constructed crowd partner.
inline constexpr double kMaxIncidentalIou = 0.5;
inline constexpr double kPairIouLow = 0.5;
inline constexpr double kPairIouHigh = 0.8;

/// Deterministic in params (including params.seed). Objects are returned
/// pairs first (partners adjacent), then singles, with densities filled.
Scene generate_scene(const SceneParams& params);

/// Jittered proposals for every non-ignored object of the scene followed by
/// background false positives. All boxes lie inside the image.
std::vector<Detection> simulate_detector(const Scene& scene, const DetectorParams& params);

struct SyntheticImage {
  std::string image_id;
  Scene scene;
  std::vector<Detection> detections;
};

/// Image i uses scene seed derive_seed(scene.seed, kSceneStream, i) and
/// detector seed derive_seed(detector.seed, kDetectorStream, i), so the
/// result is independent of `jobs`.
std::vector<SyntheticImage> make_dataset(std::size_t n_images, const SceneParams& scene,
                                         const DetectorParams& detector, unsigned jobs = 1);

inline constexpr std::uint64_t kSceneStream = 1;
inline constexpr std::uint64_t kDetectorStream = 2;

std::string synthetic_image_id(std::size_t index);

/// Writes `annotations.jsonl` and `detections.jsonl` into `dir`.
void generate_dataset(const std::filesystem::path& dir, std::size_t n_images,
                      const SceneParams& scene, const DetectorParams& detector,
                      unsigned jobs = 1);

/// Rounds to the 0.01 px grid used for generated coordinates.
double quantize_coord(double v);

}  // namespace adnms
