#pragma once

#include <stdexcept>

namespace adnms {

class InvalidBox : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box in continuous image coordinates, corner convention
/// (x1, y1) top-left to (x2, y2) bottom-right. Width is x2 - x1; there is no
/// "+1" pixel convention. Construction rejects non-finite coordinates and
/// zero or negative extent.
class BoundingBox {
 public:
  BoundingBox(double x1, double y1, double x2, double y2);

  double x1() const { return x1_; }
  double y1() const { return y1_; }
  double x2() const { return x2_; }
  double y2() const { return y2_; }

  double width() const { return x2_ - x1_; }
  double height() const { return y2_ - y1_; }

  bool operator==(const BoundingBox&) const = default;

 private:
  double x1_;
  double y1_;
  double x2_;
  double y2_;
};

double area(const BoundingBox& b);

double intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union. Symmetric, in [0, 1], exactly 1 for identical boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Intersection over the area of `det`. Used for ignore-region matching.
double ioa(const BoundingBox& det, const BoundingBox& region);

}  // namespace adnms
