#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "adnms/detection.hpp"
#include "adnms/evaluation.hpp"

namespace adnms {

struct Scene;

// One line per image:
//   {"image_id":"..","width":W,"height":H,"objects":[{"box":[x1,y1,x2,y2],"ignore":0|1}]}
// Densities are recomputed from the boxes on read; write_annotations can
// also emit them ("density" per object) for inspection.
struct ImageAnnotation {
  double width = 0.0;
  double height = 0.0;
  std::vector<GroundTruthObject> objects;

  bool operator==(const ImageAnnotation&) const = default;
};

using AnnotationMap = std::map<std::string, ImageAnnotation>;

// One line per image:
//   {"image_id":"..","detections":[{"box":[..],"score":s,"density":d}]}
// "density" is optional. source_index is the position within the line.
using DetectionMap = std::map<std::string, std::vector<Detection>>;

using WarningSink = std::function<void(const std::string&)>;

// Numbers are written with 6 significant digits.
double round_to_written_precision(double v);

AnnotationMap read_annotations(std::istream& in, const std::string& name,
                               const WarningSink& warn = {});
AnnotationMap read_annotations(const std::filesystem::path& path, const WarningSink& warn = {});

DetectionMap read_detections(std::istream& in, const std::string& name,
                             const WarningSink& warn = {});
DetectionMap read_detections(const std::filesystem::path& path, const WarningSink& warn = {});

void write_annotations(std::ostream& out, const AnnotationMap& annotations,
                       bool with_density = false);
void write_annotations(const std::filesystem::path& path, const AnnotationMap& annotations,
                       bool with_density = false);

void write_detections(std::ostream& out, const DetectionMap& detections);
void write_detections(const std::filesystem::path& path, const DetectionMap& detections);

inline constexpr const char* kToolName = "adnms";
inline constexpr const char* kToolVersion = "0.1.0";

/// Self-describing report document: tool/version, the given config, the
/// metrics, the curve and (when requested) the per-bin MR^-2 values.
nlohmann::ordered_json report_to_json(const EvalReport& report,
                                      const nlohmann::ordered_json& config, bool include_bins);

void write_report(std::ostream& out, const nlohmann::ordered_json& report);
void write_report(const std::filesystem::path& path, const nlohmann::ordered_json& report);

/// CSV with header `fppi,miss_rate`.
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);
void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve);

/// Formats a number the way every text output of this library does.
std::string format_number(double v);

ImageAnnotation to_annotation(const Scene& scene);

}  // namespace adnms
