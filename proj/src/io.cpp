#include "adnms/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "adnms/density.hpp"
#include "adnms/error.hpp"
#include "adnms/synth.hpp"

namespace adnms {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double round_to_written_precision(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

namespace {

// Parsing context for one line of one file.
class LineReader {
 public:
  LineReader(const std::string& name, std::size_t line, const WarningSink& warn)
      : name_(name), line_(line), warn_(warn) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ParseError(name_, line_, field, what);
  }

  void warn_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& prefix) const {
    if (!warn_) return;
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || key == k;
      if (!ok) {
        warn_(name_ + ":" + std::to_string(line_) + ": ignoring unknown field '" + prefix + key +
              "'");
      }
    }
  }

  const json& member(const json& obj, const char* key, const std::string& field) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(field, "missing");
    return *it;
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  double unit_interval(const json& v, const std::string& field) const {
    const double x = number(v, field);
    if (!(x >= 0.0 && x <= 1.0)) fail(field, "value " + format_number(x) + " outside [0, 1]");
    return x;
  }

  BoundingBox box(const json& v, const std::string& field) const {
    if (!v.is_array() || v.size() != 4) fail(field, "expected [x1, y1, x2, y2]");
    const double x1 = number(v[0], field);
    const double y1 = number(v[1], field);
    const double x2 = number(v[2], field);
    const double y2 = number(v[3], field);
    try {
      return BoundingBox(x1, y1, x2, y2);
    } catch (const InvalidBox& e) {
      fail(field, e.what());
    }
  }

  std::string image_id(const json& rec) const {
    const json& id = member(rec, "image_id", "image_id");
    if (!id.is_string()) fail("image_id", "expected a string");
    return id.get<std::string>();
  }

  json parse(const std::string& text) const {
    try {
      json rec = json::parse(text);
      if (!rec.is_object()) fail("<record>", "expected a JSON object");
      return rec;
    } catch (const json::parse_error& e) {
      fail("<record>", e.what());
    }
  }

 private:
  const std::string& name_;
  std::size_t line_;
  const WarningSink& warn_;
};

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(path.string() + ": write failed");
}

ordered_json box_json(const BoundingBox& b) {
  return ordered_json::array({round_to_written_precision(b.x1()), round_to_written_precision(b.y1()),
                              round_to_written_precision(b.x2()), round_to_written_precision(b.y2())});
}

}  // namespace

AnnotationMap read_annotations(std::istream& in, const std::string& name, const WarningSink& warn) {
  AnnotationMap out;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (blank(text)) continue;
    const LineReader r(name, line, warn);
    const json rec = r.parse(text);
    r.warn_unknown(rec, {"image_id", "width", "height", "objects"}, "");
    const std::string id = r.image_id(rec);

    ImageAnnotation ann;
    ann.width = r.number(r.member(rec, "width", "width"), "width");
    ann.height = r.number(r.member(rec, "height", "height"), "height");
    if (!(ann.width > 0.0)) r.fail("width", "must be positive");
    if (!(ann.height > 0.0)) r.fail("height", "must be positive");

    const json& objects = r.member(rec, "objects", "objects");
    if (!objects.is_array()) r.fail("objects", "expected an array");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const std::string prefix = "objects[" + std::to_string(i) + "]";
      const json& o = objects[i];
      if (!o.is_object()) r.fail(prefix, "expected an object");
      r.warn_unknown(o, {"box", "ignore", "density"}, prefix + ".");
      GroundTruthObject gt{r.box(r.member(o, "box", prefix + ".box"), prefix + ".box"), false, 0.0};
      if (auto it = o.find("ignore"); it != o.end()) {
        if (it->is_boolean()) {
          gt.ignore = it->get<bool>();
        } else if (it->is_number_integer() && (*it == 0 || *it == 1)) {
          gt.ignore = *it == 1;
        } else {
          r.fail(prefix + ".ignore", "expected 0 or 1");
        }
      }
      ann.objects.push_back(gt);
    }
    fill_gt_densities(ann.objects);
    if (!out.emplace(id, std::move(ann)).second) r.fail("image_id", "duplicate image id '" + id + "'");
  }
  return out;
}

AnnotationMap read_annotations(const std::filesystem::path& path, const WarningSink& warn) {
  auto in = open_in(path);
  return read_annotations(in, path.string(), warn);
}

DetectionMap read_detections(std::istream& in, const std::string& name, const WarningSink& warn) {
  DetectionMap out;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (blank(text)) continue;
    const LineReader r(name, line, warn);
    const json rec = r.parse(text);
    r.warn_unknown(rec, {"image_id", "detections"}, "");
    const std::string id = r.image_id(rec);

    const json& list = r.member(rec, "detections", "detections");
    if (!list.is_array()) r.fail("detections", "expected an array");
    std::vector<Detection> dets;
    dets.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string prefix = "detections[" + std::to_string(i) + "]";
      const json& d = list[i];
      if (!d.is_object()) r.fail(prefix, "expected an object");
      r.warn_unknown(d, {"box", "score", "density"}, prefix + ".");
      Detection det{r.box(r.member(d, "box", prefix + ".box"), prefix + ".box"),
                    r.unit_interval(r.member(d, "score", prefix + ".score"), prefix + ".score"),
                    std::nullopt, i};
      if (auto it = d.find("density"); it != d.end() && !it->is_null()) {
        det.density = r.unit_interval(*it, prefix + ".density");
      }
      dets.push_back(std::move(det));
    }
    if (!out.emplace(id, std::move(dets)).second) r.fail("image_id", "duplicate image id '" + id + "'");
  }
  return out;
}

DetectionMap read_detections(const std::filesystem::path& path, const WarningSink& warn) {
  auto in = open_in(path);
  return read_detections(in, path.string(), warn);
}

void write_annotations(std::ostream& out, const AnnotationMap& annotations, bool with_density) {
  for (const auto& [id, ann] : annotations) {
    ordered_json rec;
    rec["image_id"] = id;
    rec["width"] = round_to_written_precision(ann.width);
    rec["height"] = round_to_written_precision(ann.height);
    ordered_json objects = ordered_json::array();
    for (const auto& o : ann.objects) {
      ordered_json obj;
      obj["box"] = box_json(o.box);
      obj["ignore"] = o.ignore ? 1 : 0;
      if (with_density) obj["density"] = round_to_written_precision(o.density);
      objects.push_back(std::move(obj));
    }
    rec["objects"] = std::move(objects);
    out << rec.dump() << '\n';
  }
}

void write_annotations(const std::filesystem::path& path, const AnnotationMap& annotations,
                       bool with_density) {
  auto out = open_out(path);
  write_annotations(out, annotations, with_density);
  finish(out, path);
}

void write_detections(std::ostream& out, const DetectionMap& detections) {
  for (const auto& [id, dets] : detections) {
    ordered_json rec;
    rec["image_id"] = id;
    ordered_json list = ordered_json::array();
    for (const auto& d : dets) {
      ordered_json obj;
      obj["box"] = box_json(d.box);
      obj["score"] = round_to_written_precision(d.score);
      if (d.density) obj["density"] = round_to_written_precision(*d.density);
      list.push_back(std::move(obj));
    }
    rec["detections"] = std::move(list);
    out << rec.dump() << '\n';
  }
}

void write_detections(const std::filesystem::path& path, const DetectionMap& detections) {
  auto out = open_out(path);
  write_detections(out, detections);
  finish(out, path);
}

ordered_json report_to_json(const EvalReport& report, const ordered_json& config, bool include_bins) {
  static constexpr const char* kBinLabels[kDensityBins] = {
      "density<=0.4", "0.4<density<=0.5", "0.5<density<=0.6", "0.6<density<=0.7", "density>0.7"};

  ordered_json doc;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["config"] = config;
  doc["num_images"] = report.num_images;
  doc["num_gt"] = report.num_gt;
  doc["num_tp"] = report.num_tp;
  doc["num_fp"] = report.num_fp;
  doc["mr2"] = round_to_written_precision(report.mr2);
  doc["ap"] = round_to_written_precision(report.ap);
  doc["recall"] = round_to_written_precision(report.recall);
  if (include_bins) {
    ordered_json bins = ordered_json::array();
    for (std::size_t b = 0; b < kDensityBins; ++b) {
      ordered_json entry;
      entry["bin"] = kBinLabels[b];
      if (report.bin_mr2[b]) {
        entry["mr2"] = round_to_written_precision(*report.bin_mr2[b]);
      } else {
        entry["mr2"] = nullptr;
      }
      bins.push_back(std::move(entry));
    }
    doc["bins"] = std::move(bins);
  }
  ordered_json curve = ordered_json::array();
  for (const auto& p : report.curve) {
    curve.push_back(ordered_json::array(
        {round_to_written_precision(p.fppi), round_to_written_precision(p.miss_rate)}));
  }
  doc["curve"] = std::move(curve);
  return doc;
}

void write_report(std::ostream& out, const ordered_json& report) { out << report.dump(2) << '\n'; }

void write_report(const std::filesystem::path& path, const ordered_json& report) {
  auto out = open_out(path);
  write_report(out, report);
  finish(out, path);
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "fppi,miss_rate\n";
  for (const auto& p : curve) out << format_number(p.fppi) << ',' << format_number(p.miss_rate) << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<CurvePoint>& curve) {
  auto out = open_out(path);
  write_curve_csv(out, curve);
  finish(out, path);
}

ImageAnnotation to_annotation(const Scene& scene) {
  ImageAnnotation ann;
  ann.width = scene.width;
  ann.height = scene.height;
  ann.objects = scene.objects;
  for (const auto& region : scene.ignore_regions) ann.objects.push_back({region, true, 0.0});
  fill_gt_densities(ann.objects);
  return ann;
}

}  // namespace adnms
