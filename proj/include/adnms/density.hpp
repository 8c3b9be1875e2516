#pragma once

#include <span>
#include <vector>

#include "adnms/detection.hpp"

namespace adnms {

// Where a detection's density comes from. `Oracle` transfers the density of
// the best-matching ground-truth object; `SelfEstimate` uses the maximum IoU
// with other confident co-detections; `Provided` trusts values already on
// the detections (e.g. from an external density model).
enum class DensityMode { Oracle, SelfEstimate, Provided };

struct DensitySource {
  DensityMode mode = DensityMode::Provided;
  // Minimum score of a co-detection considered by SelfEstimate.
  double score_floor = 0.05;
};

// IoU a detection needs with a ground-truth object to inherit its density.
inline constexpr double kOracleMatchIou = 0.5;

/// Density of every object: the maximum IoU with any other non-ignored object
/// in the set, or 0 when there is none. Output order follows input order.
std::vector<double> gt_densities(std::span<const GroundTruthObject> objects);

/// Recomputes and stores the density field of every object in place.
void fill_gt_densities(std::vector<GroundTruthObject>& objects);

/// Returns a copy of `dets` with densities attached according to `source`.
/// Oracle mode requires `gts`; Provided mode requires every detection to
/// carry a density in [0, 1]. Throws ConfigError / InputError otherwise.
std::vector<Detection> attach_densities(std::span<const Detection> dets,
                                        const std::vector<GroundTruthObject>* gts,
                                        const DensitySource& source);

}  // namespace adnms
