#include "adnms/suppression.hpp"

#include <algorithm>
#include <cmath>

#include "adnms/error.hpp"

namespace adnms {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Greedy:
      return "greedy";
    case Method::SoftLinear:
      return "soft-linear";
    case Method::SoftGaussian:
      return "soft-gaussian";
  }
  return "unknown";
}

void SuppressionConfig::validate() const {
  if (!(nt > 0.0 && nt < 1.0)) throw ConfigError("nt must be in (0, 1)");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be > 0");
  if (!(score_floor >= 0.0) || !std::isfinite(score_floor)) {
    throw ConfigError("score_floor must be >= 0");
  }
}

double adaptive_threshold(double nt, double d_m) { return std::max(nt, d_m); }

double rescore_weight(Method method, double overlap, double sigma) {
  switch (method) {
    case Method::Greedy:
      return 0.0;
    case Method::SoftLinear:
      return 1.0 - overlap;
    case Method::SoftGaussian:
      return std::exp(-(overlap * overlap) / sigma);
  }
  return 0.0;
}

bool in_suppression_range(double overlap, double nt, bool adaptive, double d_m) {
  if (adaptive && d_m > nt) return overlap > adaptive_threshold(nt, d_m);
  return overlap >= nt;
}

SuppressionResult suppress(std::span<const Detection> dets, const SuppressionConfig& cfg) {
  cfg.validate();
  for (const auto& d : dets) {
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw InputError("detection " + std::to_string(d.source_index) +
                       " has a score outside [0, 1]");
    }
    if (cfg.adaptive && !d.density) {
      throw ConfigError("adaptive suppression requires a density on every detection");
    }
    if (d.density && !(*d.density >= 0.0 && *d.density <= 1.0)) {
      throw InputError("detection " + std::to_string(d.source_index) +
                       " has a density outside [0, 1]");
    }
  }

  // Remaining candidates as (index into dets, current score).
  struct Candidate {
    std::size_t index;
    double score;
  };
  std::vector<Candidate> pool;
  pool.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) pool.push_back({i, dets[i].score});

  auto ranks_before = [&](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return dets[a.index].source_index < dets[b.index].source_index;
  };

  SuppressionResult result;
  result.kept.reserve(dets.size());
  while (!pool.empty()) {
    const auto top = std::min_element(pool.begin(), pool.end(), ranks_before);
    const Candidate m = *top;
    pool.erase(top);

    Detection kept = dets[m.index];
    kept.score = m.score;
    const BoundingBox& m_box = kept.box;
    const double d_m = kept.density.value_or(0.0);
    result.kept.push_back(std::move(kept));

    std::erase_if(pool, [&](Candidate& c) {
      const double overlap = iou(m_box, dets[c.index].box);
      if (!in_suppression_range(overlap, cfg.nt, cfg.adaptive, d_m)) return false;
      if (cfg.method == Method::Greedy) return true;
      c.score *= rescore_weight(cfg.method, overlap, cfg.sigma);
      return c.score < cfg.score_floor;
    });
  }
  result.suppressed_count = dets.size() - result.kept.size();
  return result;
}

}  // namespace adnms
