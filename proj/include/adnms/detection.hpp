#pragma once

#include <cstddef>
#include <optional>

#include "adnms/geometry.hpp"

namespace adnms {

struct Detection {
  BoundingBox box;
  double score = 0.0;
  std::optional<double> density;
  // Position in the original per-image input; breaks score ties.
  std::size_t source_index = 0;

  bool operator==(const Detection&) const = default;
};

struct GroundTruthObject {
  BoundingBox box;
  bool ignore = false;
  // Max IoU with any other non-ignored object of the same image; 0 if isolated.
  double density = 0.0;

  double height() const { return box.height(); }

  bool operator==(const GroundTruthObject&) const = default;
};

}  // namespace adnms
