#include "oracles.hpp"

#include <algorithm>
#include <numeric>

namespace oracle {

double pixel_iou(const IntBox& a, const IntBox& b) {
  const int lo_x = std::min(a[0], b[0]);
  const int hi_x = std::max(a[2], b[2]);
  const int lo_y = std::min(a[1], b[1]);
  const int hi_y = std::max(a[3], b[3]);
  long inter = 0;
  long uni = 0;
  for (int x = lo_x; x < hi_x; ++x) {
    for (int y = lo_y; y < hi_y; ++y) {
      const bool in_a = x >= a[0] && x < a[2] && y >= a[1] && y < a[3];
      const bool in_b = x >= b[0] && x < b[2] && y >= b[1] && y < b[3];
      inter += (in_a && in_b) ? 1 : 0;
      uni += (in_a || in_b) ? 1 : 0;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double reference_iou(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  const double left = a[0] > b[0] ? a[0] : b[0];
  const double right = a[2] < b[2] ? a[2] : b[2];
  const double top = a[1] > b[1] ? a[1] : b[1];
  const double bottom = a[3] < b[3] ? a[3] : b[3];
  if (right <= left || bottom <= top) return 0.0;
  const double inter = (right - left) * (bottom - top);
  const double area_a = (a[2] - a[0]) * (a[3] - a[1]);
  const double area_b = (b[2] - b[0]) * (b[3] - b[1]);
  return inter / (area_a + area_b - inter);
}

std::vector<std::size_t> greedy_nms(const std::vector<ScoredBox>& boxes, double nt) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return boxes[a].score > boxes[b].score; });
  std::vector<bool> removed(boxes.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const std::size_t i = order[p];
    if (removed[i]) continue;
    kept.push_back(i);
    for (std::size_t q = p + 1; q < order.size(); ++q) {
      const std::size_t j = order[q];
      if (!removed[j] && reference_iou(boxes[i].box, boxes[j].box) >= nt) removed[j] = true;
    }
  }
  return kept;
}

std::vector<double> pairwise_densities(const std::vector<std::array<double, 4>>& boxes,
                                       const std::vector<bool>& ignore) {
  std::vector<double> d(boxes.size(), 0.0);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      const double o = reference_iou(boxes[i], boxes[j]);
      if (!ignore[j]) d[i] = std::max(d[i], o);
      if (!ignore[i]) d[j] = std::max(d[j], o);
    }
  }
  return d;
}

std::array<double, 4> random_box(std::mt19937_64& rng, double extent, bool integer_coords) {
  std::uniform_real_distribution<double> pos(0.0, extent * 0.8);
  std::uniform_real_distribution<double> size(1.0, extent * 0.4);
  double x = pos(rng);
  double y = pos(rng);
  double w = size(rng);
  double h = size(rng);
  if (integer_coords) {
    x = static_cast<int>(x);
    y = static_cast<int>(y);
    w = static_cast<int>(w) + 1;
    h = static_cast<int>(h) + 1;
  }
  return {x, y, x + w, y + h};
}

}  // namespace oracle
