#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adnms/detection.hpp"

namespace adnms {

// Rescoring function applied to neighbours of the current maximum.
enum class Method { Greedy, SoftLinear, SoftGaussian };

std::string_view to_string(Method m);

struct SuppressionConfig {
  Method method = Method::Greedy;
  // Scale the threshold by the density of the selected box.
  bool adaptive = false;
  // Base threshold N_t.
  double nt = 0.5;
  // Gaussian decay parameter, used only by SoftGaussian.
  double sigma = 0.5;
  // Decayed scores below this are pruned. Greedy always prunes.
  double score_floor = 0.001;

  void validate() const;
};

struct SuppressionResult {
  // Final detections, sorted by (rescored) score descending.
  std::vector<Detection> kept;
  std::size_t suppressed_count = 0;
};

/// max(nt, d_m): a selected box in a crowded region raises its own threshold.
double adaptive_threshold(double nt, double d_m);

/// Weight multiplied onto a neighbour's score once its overlap with the
/// selected box reaches the active threshold.
double rescore_weight(Method method, double overlap, double sigma);

/// Whether a neighbour at `overlap` is rescored by a selected box of density
/// `d_m`. Non-adaptive: overlap >= nt. Adaptive: overlap >= nt when d_m <= nt,
/// otherwise overlap > d_m, so a neighbour exactly at the crowd overlap of the
/// selected object survives.
bool in_suppression_range(double overlap, double nt, bool adaptive, double d_m);

/// Runs the unified greedy / soft / adaptive loop over one image.
/// Throws ConfigError for an invalid config or missing densities in adaptive
/// mode, and InputError for scores outside [0, 1] (including NaN).
SuppressionResult suppress(std::span<const Detection> dets, const SuppressionConfig& cfg);

}  // namespace adnms
