#include "adnms/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adnms {

BoundingBox::BoundingBox(double x1, double y1, double x2, double y2)
    : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2)) {
    throw InvalidBox("box coordinates must be finite");
  }
  if (!(x2 > x1) || !(y2 > y1)) {
    std::ostringstream msg;
    msg << "degenerate box [" << x1 << ", " << y1 << ", " << x2 << ", " << y2 << "]";
    throw InvalidBox(msg.str());
  }
}

double area(const BoundingBox& b) { return b.width() * b.height(); }

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::max(0.0, std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1()));
  const double h = std::max(0.0, std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1()));
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  return inter / (area(a) + area(b) - inter);
}

double ioa(const BoundingBox& det, const BoundingBox& region) {
  return intersection_area(det, region) / area(det);
}

}  // namespace adnms
