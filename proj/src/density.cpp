#include "adnms/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adnms/error.hpp"

namespace adnms {

std::vector<double> gt_densities(std::span<const GroundTruthObject> objects) {
  std::vector<double> out(objects.size(), 0.0);
  for (std::size_t i = 0; i < objects.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < objects.size(); ++j) {
      if (j == i || objects[j].ignore) continue;
      d = std::max(d, iou(objects[i].box, objects[j].box));
    }
    out[i] = d;
  }
  return out;
}

void fill_gt_densities(std::vector<GroundTruthObject>& objects) {
  const auto d = gt_densities(objects);
  for (std::size_t i = 0; i < objects.size(); ++i) objects[i].density = d[i];
}

namespace {

double oracle_density(const BoundingBox& box, const std::vector<GroundTruthObject>& gts) {
  double best_iou = 0.0;
  double density = 0.0;
  for (const auto& gt : gts) {
    if (gt.ignore) continue;
    const double o = iou(box, gt.box);
    if (o > best_iou) {
      best_iou = o;
      density = gt.density;
    }
  }
  return best_iou >= kOracleMatchIou ? density : 0.0;
}

}  // namespace

std::vector<Detection> attach_densities(std::span<const Detection> dets,
                                        const std::vector<GroundTruthObject>* gts,
                                        const DensitySource& source) {
  std::vector<Detection> out(dets.begin(), dets.end());
  switch (source.mode) {
    case DensityMode::Provided:
      for (const auto& d : out) {
        if (!d.density) {
          throw InputError("detection " + std::to_string(d.source_index) +
                           " has no density but the density source is 'provided'");
        }
        if (!(*d.density >= 0.0 && *d.density <= 1.0)) {
          throw InputError("detection " + std::to_string(d.source_index) +
                           " has density outside [0, 1]");
        }
      }
      break;
    case DensityMode::Oracle:
      if (gts == nullptr) throw ConfigError("oracle densities require ground truth");
      for (auto& d : out) d.density = oracle_density(d.box, *gts);
      break;
    case DensityMode::SelfEstimate:
      if (!(source.score_floor >= 0.0)) throw ConfigError("score_floor must be >= 0");
      for (std::size_t i = 0; i < out.size(); ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < dets.size(); ++j) {
          if (j == i || dets[j].score < source.score_floor) continue;
          m = std::max(m, iou(dets[i].box, dets[j].box));
        }
        out[i].density = m;
      }
      break;
  }
  return out;
}

}  // namespace adnms
