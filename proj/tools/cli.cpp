#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "adnms/density.hpp"
#include "adnms/error.hpp"
#include "adnms/evaluation.hpp"
#include "adnms/io.hpp"
#include "adnms/parallel.hpp"
#include "adnms/suppression.hpp"
#include "adnms/synth.hpp"

namespace adnms::cli {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 2019;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
  std::string output;
};

// --method values: a weight function, optionally with the adaptive threshold.
struct MethodSpec {
  Method method = Method::Greedy;
  bool adaptive = false;
};

const std::map<std::string, MethodSpec>& method_names() {
  static const std::map<std::string, MethodSpec> names = {
      {"greedy", {Method::Greedy, false}},
      {"soft-linear", {Method::SoftLinear, false}},
      {"soft-gaussian", {Method::SoftGaussian, false}},
      {"adaptive", {Method::Greedy, true}},
      {"adaptive-soft-linear", {Method::SoftLinear, true}},
      {"adaptive-soft-gaussian", {Method::SoftGaussian, true}},
  };
  return names;
}

MethodSpec parse_method(const std::string& name) {
  const auto& names = method_names();
  auto it = names.find(name);
  if (it == names.end()) throw ConfigError("unknown method '" + name + "'");
  return it->second;
}

const std::map<std::string, DensityMode> kDensityModes = {
    {"oracle", DensityMode::Oracle},
    {"self", DensityMode::SelfEstimate},
    {"provided", DensityMode::Provided},
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list");
  return out;
}

// Writes through `write` to --output when given, else to `out`.
template <typename Fn>
void emit(const std::string& output, std::ostream& out, Fn&& write) {
  if (output.empty()) {
    write(out);
    return;
  }
  std::ofstream file(output, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(output + ": cannot open for writing");
  write(file);
  file.flush();
  if (!file) throw IoError(output + ": write failed");
}

WarningSink warnings_to(std::ostream& err) {
  return [&err](const std::string& msg) { err << "warning: " << msg << '\n'; };
}

// ---------------------------------------------------------------- suppress

struct SuppressOptions {
  std::string detections;
  std::string annotations;
  std::string method = "greedy";
  double nt = 0.5;
  double sigma = 0.5;
  double score_floor = 0.001;
  std::string density_source;
  double self_score_floor = 0.05;
};

std::optional<DensitySource> resolve_density_source(const std::string& name, double self_floor) {
  if (name.empty()) return std::nullopt;
  auto it = kDensityModes.find(name);
  if (it == kDensityModes.end()) throw ConfigError("unknown density source '" + name + "'");
  return DensitySource{it->second, self_floor};
}

// Attaches densities (when a source is given) and suppresses every image.
DetectionMap suppress_all(const DetectionMap& dets, const AnnotationMap* annotations,
                          const std::optional<DensitySource>& source,
                          const SuppressionConfig& cfg, unsigned jobs,
                          std::size_t* suppressed_total) {
  std::vector<const std::string*> ids;
  for (const auto& [id, _] : dets) ids.push_back(&id);
  std::vector<std::vector<Detection>> kept(ids.size());
  std::vector<std::size_t> suppressed(ids.size(), 0);
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const auto& in = dets.at(*ids[i]);
    std::vector<Detection> prepared;
    if (source) {
      const std::vector<GroundTruthObject>* gts = nullptr;
      if (annotations) {
        auto it = annotations->find(*ids[i]);
        if (it != annotations->end()) gts = &it->second.objects;
      }
      static const std::vector<GroundTruthObject> kNoObjects;
      if (source->mode == DensityMode::Oracle && !gts) gts = &kNoObjects;
      prepared = attach_densities(in, gts, *source);
    } else {
      prepared = in;
    }
    if (cfg.adaptive) {
      for (const auto& d : prepared) {
        if (!d.density) {
          throw InputError("image '" + *ids[i] + "': adaptive suppression needs densities; " +
                           "detection " + std::to_string(d.source_index) +
                           " has none (pass --density-source)");
        }
      }
    }
    auto result = suppress(prepared, cfg);
    kept[i] = std::move(result.kept);
    suppressed[i] = result.suppressed_count;
  });
  DetectionMap out;
  std::size_t total = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.emplace(*ids[i], std::move(kept[i]));
    total += suppressed[i];
  }
  if (suppressed_total) *suppressed_total = total;
  return out;
}

std::optional<AnnotationMap> maybe_annotations(const std::string& path, std::ostream& err) {
  if (path.empty()) return std::nullopt;
  return read_annotations(std::filesystem::path(path), warnings_to(err));
}

int cmd_suppress(const SuppressOptions& o, const Globals& g, std::ostream& out, std::ostream& err) {
  const MethodSpec spec = parse_method(o.method);
  SuppressionConfig cfg{spec.method, spec.adaptive, o.nt, o.sigma, o.score_floor};
  cfg.validate();
  auto source = resolve_density_source(o.density_source, o.self_score_floor);
  if (source && source->mode == DensityMode::Oracle && o.annotations.empty()) {
    throw ConfigError("--density-source oracle requires --annotations");
  }

  const auto dets = read_detections(std::filesystem::path(o.detections), warnings_to(err));
  const auto annotations = maybe_annotations(o.annotations, err);
  std::size_t suppressed = 0;
  const auto kept = suppress_all(dets, annotations ? &*annotations : nullptr, source, cfg, g.jobs,
                                 &suppressed);

  std::size_t n_kept = 0;
  for (const auto& [_, v] : kept) n_kept += v.size();
  emit(g.output, out, [&](std::ostream& os) { write_detections(os, kept); });
  err << "kept " << n_kept << ", suppressed " << suppressed << " across " << kept.size()
      << " images\n";
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalFlags {
  std::string annotations;
  std::string detections;
  double iou = kDefaultMatchIou;
  bool bins = false;
  std::string curve;
};

std::vector<ImageEvalInput> build_eval_inputs(const AnnotationMap& annotations,
                                              const DetectionMap& dets) {
  std::vector<std::string> unknown;
  for (const auto& [id, _] : dets) {
    if (!annotations.count(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    std::string msg = "detections reference image ids missing from the annotations:";
    for (const auto& id : unknown) msg += " " + id;
    throw InputError(msg);
  }
  std::vector<ImageEvalInput> inputs;
  inputs.reserve(annotations.size());
  for (const auto& [id, ann] : annotations) {
    ImageEvalInput in;
    in.image_id = id;
    in.gts = ann.objects;
    if (auto it = dets.find(id); it != dets.end()) in.dets = it->second;
    inputs.push_back(std::move(in));
  }
  return inputs;
}

int cmd_eval(const EvalFlags& o, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto annotations = read_annotations(std::filesystem::path(o.annotations), warnings_to(err));
  const auto dets = read_detections(std::filesystem::path(o.detections), warnings_to(err));
  const auto inputs = build_eval_inputs(annotations, dets);
  const EvalReport report = evaluate(inputs, {o.iou, o.bins, g.jobs});

  ordered_json config;
  config["command"] = "eval";
  config["annotations"] = o.annotations;
  config["detections"] = o.detections;
  config["iou"] = o.iou;
  config["bins"] = o.bins;
  config["seed"] = g.seed;

  const auto doc = report_to_json(report, config, o.bins);
  emit(g.output, out, [&](std::ostream& os) { write_report(os, doc); });
  if (!o.curve.empty()) write_curve_csv(std::filesystem::path(o.curve), report.curve);
  err << "mr2 " << format_number(report.mr2) << ", ap " << format_number(report.ap) << ", recall "
      << format_number(report.recall) << " over " << report.num_images << " images\n";
  return kExitOk;
}

// ----------------------------------------------------------------- density

int cmd_density(const std::string& annotations_path, const Globals& g, std::ostream& out,
                std::ostream& err) {
  const auto annotations = read_annotations(std::filesystem::path(annotations_path), warnings_to(err));
  emit(g.output, out, [&](std::ostream& os) { write_annotations(os, annotations, true); });
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
  std::string preset = "crowdhuman";
  std::size_t images = 200;
  std::optional<double> width, height, persons, pairs, min_height, max_height, aspect, ignore_rate;
  DetectorParams detector;
};

ordered_json scene_json(const SceneParams& p) {
  ordered_json j;
  j["image_width"] = p.image_width;
  j["image_height"] = p.image_height;
  j["persons_per_image"] = p.persons_per_image;
  j["crowd_pair_rate"] = p.crowd_pair_rate;
  j["min_height"] = p.min_height;
  j["max_height"] = p.max_height;
  j["aspect_ratio"] = p.aspect_ratio;
  j["ignore_region_rate"] = p.ignore_region_rate;
  j["seed"] = p.seed;
  return j;
}

ordered_json detector_json(const DetectorParams& p) {
  ordered_json j;
  j["localization_noise"] = p.localization_noise;
  j["duplicate_count"] = p.duplicate_count;
  j["score_base"] = p.score_base;
  j["score_spread"] = p.score_spread;
  j["score_alpha"] = p.score_alpha;
  j["score_noise"] = p.score_noise;
  j["fp_rate"] = p.fp_rate;
  j["fp_score_min"] = p.fp_score_min;
  j["fp_score_max"] = p.fp_score_max;
  j["fp_min_height"] = p.fp_min_height;
  j["fp_max_height"] = p.fp_max_height;
  j["fp_aspect_ratio"] = p.fp_aspect_ratio;
  j["seed"] = p.seed;
  return j;
}

int cmd_simulate(const SimulateFlags& o, const Globals& g, std::ostream& err) {
  if (g.output.empty()) throw ConfigError("simulate requires --output <directory>");
  SceneParams scene;
  if (o.preset == "crowdhuman") {
    scene = SceneParams::crowdhuman();
  } else if (o.preset == "citypersons") {
    scene = SceneParams::citypersons();
  } else {
    throw ConfigError("unknown preset '" + o.preset + "'");
  }
  if (o.width) scene.image_width = *o.width;
  if (o.height) scene.image_height = *o.height;
  if (o.persons) scene.persons_per_image = *o.persons;
  if (o.pairs) scene.crowd_pair_rate = *o.pairs;
  if (o.min_height) scene.min_height = *o.min_height;
  if (o.max_height) scene.max_height = *o.max_height;
  if (o.aspect) scene.aspect_ratio = *o.aspect;
  if (o.ignore_rate) scene.ignore_region_rate = *o.ignore_rate;
  scene.seed = g.seed;
  DetectorParams detector = o.detector;
  detector.seed = g.seed;

  const std::filesystem::path dir(g.output);
  generate_dataset(dir, o.images, scene, detector, g.jobs);

  ordered_json manifest;
  manifest["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  manifest["config"] = {{"command", "simulate"}, {"preset", o.preset}, {"images", o.images},
                        {"seed", g.seed}, {"scene", scene_json(scene)},
                        {"detector", detector_json(detector)},
                        {"seed_rule", "per-image seed = derive_seed(seed, stream, index); "
                                      "scene stream 1, detector stream 2"}};
  manifest["files"] = {"annotations.jsonl", "detections.jsonl"};
  write_report(dir / "manifest.json", manifest);
  err << "wrote " << o.images << " images to " << dir.string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepFlags {
  std::string annotations;
  std::string detections;
  std::string methods = "greedy,soft-linear,adaptive";
  std::string nts = "0.5";
  double sigma = 0.5;
  double score_floor = 0.001;
  std::string density_source = "oracle";
  double self_score_floor = 0.05;
  double iou = kDefaultMatchIou;
};

int cmd_sweep(const SweepFlags& o, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto methods = split_list(o.methods);
  if (methods.empty()) throw ConfigError("--methods: empty list");
  for (const auto& m : methods) parse_method(m);
  const auto nts = parse_numbers(o.nts, "--nt");
  for (double nt : nts) SuppressionConfig{Method::Greedy, false, nt, o.sigma, o.score_floor}.validate();
  const auto source = resolve_density_source(o.density_source, o.self_score_floor);

  const auto annotations = read_annotations(std::filesystem::path(o.annotations), warnings_to(err));
  const auto raw = read_detections(std::filesystem::path(o.detections), warnings_to(err));
  build_eval_inputs(annotations, raw);  // id check up front

  std::ostringstream table;
  table << "method,nt,kept,tp,fp,mr2,ap,recall";
  for (std::size_t b = 1; b <= kDensityBins; ++b) table << ",bin" << b << "_mr2";
  table << '\n';
  for (const auto& name : methods) {
    const MethodSpec spec = parse_method(name);
    for (double nt : nts) {
      const SuppressionConfig cfg{spec.method, spec.adaptive, nt, o.sigma, o.score_floor};
      const auto kept = suppress_all(raw, &annotations, source, cfg, g.jobs, nullptr);
      const auto inputs = build_eval_inputs(annotations, kept);
      const EvalReport r = evaluate(inputs, {o.iou, true, g.jobs});
      std::size_t n_kept = 0;
      for (const auto& [_, v] : kept) n_kept += v.size();
      table << name << ',' << format_number(nt) << ',' << n_kept << ',' << r.num_tp << ','
            << r.num_fp << ',' << format_number(r.mr2) << ',' << format_number(r.ap) << ','
            << format_number(r.recall);
      for (const auto& bin : r.bin_mr2) {
        table << ',';
        if (bin) table << format_number(*bin);
      }
      table << '\n';
      err << name << " nt=" << format_number(nt) << ": mr2 " << format_number(r.mr2) << '\n';
    }
  }
  emit(g.output, out, [&](std::ostream& os) { os << table.str(); });
  return kExitOk;
}

void add_globals(CLI::App& app, Globals& g) {
  app.add_option("--seed", g.seed, "Master seed (recorded in outputs; drives simulate)")
      ->capture_default_str();
  app.add_option("--jobs,-j", g.jobs, "Worker threads for per-image work")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  app.add_option("--output,-o", g.output, "Output file (directory for simulate); stdout if omitted");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive non-maximum suppression and crowd pedestrian evaluation toolkit", "adnms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Globals globals;
  add_globals(app, globals);

  SuppressOptions sup;
  auto* suppress_cmd = app.add_subcommand("suppress", "Run greedy / soft / adaptive NMS on a detection file");
  suppress_cmd->fallthrough();
  suppress_cmd->add_option("--detections,-d", sup.detections, "Detection file (JSON lines)")->required();
  suppress_cmd->add_option("--annotations,-a", sup.annotations, "Annotation file, needed for oracle densities");
  suppress_cmd->add_option("--method,-m", sup.method,
                           "greedy | soft-linear | soft-gaussian | adaptive | adaptive-soft-linear | "
                           "adaptive-soft-gaussian")
      ->capture_default_str();
  suppress_cmd->add_option("--nt", sup.nt, "Base suppression threshold N_t")->capture_default_str();
  suppress_cmd->add_option("--sigma", sup.sigma, "Gaussian decay parameter")->capture_default_str();
  suppress_cmd->add_option("--score-floor", sup.score_floor, "Prune decayed scores below this")
      ->capture_default_str();
  suppress_cmd->add_option("--density-source", sup.density_source,
                           "oracle | self | provided (adaptive defaults to provided)");
  suppress_cmd->add_option("--self-score-floor", sup.self_score_floor,
                           "Minimum co-detection score for self-estimated densities")
      ->capture_default_str();

  EvalFlags ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate detections: MR^-2, AP, recall, density bins");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--annotations,-a", ev.annotations, "Annotation file")->required();
  eval_cmd->add_option("--detections,-d", ev.detections, "Detection file")->required();
  eval_cmd->add_option("--iou", ev.iou, "Match IoU threshold")->capture_default_str();
  eval_cmd->add_flag("--bins", ev.bins, "Add per-density-bin MR^-2");
  eval_cmd->add_option("--curve", ev.curve, "Also write the FPPI / miss-rate curve as CSV");

  std::string density_annotations;
  auto* density_cmd = app.add_subcommand("density", "Dump annotations with per-object densities");
  density_cmd->fallthrough();
  density_cmd->add_option("--annotations,-a", density_annotations, "Annotation file")->required();

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a seeded synthetic crowd dataset");
  sim_cmd->fallthrough();
  sim_cmd->add_option("--preset", sim.preset, "crowdhuman | citypersons")->capture_default_str();
  sim_cmd->add_option("--images,-n", sim.images, "Number of images")->capture_default_str();
  sim_cmd->add_option("--width", sim.width, "Image width (px)");
  sim_cmd->add_option("--height", sim.height, "Image height (px)");
  sim_cmd->add_option("--persons", sim.persons, "Mean persons per image");
  sim_cmd->add_option("--pairs", sim.pairs, "Mean constructed crowd pairs (IoU > 0.5) per image");
  sim_cmd->add_option("--min-height", sim.min_height, "Minimum person height (px, >= 50)");
  sim_cmd->add_option("--max-height", sim.max_height, "Maximum person height (px)");
  sim_cmd->add_option("--aspect", sim.aspect, "Person width / height");
  sim_cmd->add_option("--ignore-rate", sim.ignore_rate, "Mean ignore regions per image");
  sim_cmd->add_option("--noise", sim.detector.localization_noise, "Relative localisation jitter")
      ->capture_default_str();
  sim_cmd->add_option("--duplicates", sim.detector.duplicate_count, "Proposals per object")
      ->capture_default_str();
  sim_cmd->add_option("--score-base", sim.detector.score_base, "Best object score")->capture_default_str();
  sim_cmd->add_option("--score-spread", sim.detector.score_spread, "Per-object score spread")
      ->capture_default_str();
  sim_cmd->add_option("--score-alpha", sim.detector.score_alpha, "Score penalty per unit of (1 - IoU)")
      ->capture_default_str();
  sim_cmd->add_option("--score-noise", sim.detector.score_noise, "Per-proposal uniform score noise")
      ->capture_default_str();
  sim_cmd->add_option("--fp-rate", sim.detector.fp_rate, "Mean background false positives per image")
      ->capture_default_str();
  sim_cmd->add_option("--fp-score-min", sim.detector.fp_score_min)->capture_default_str();
  sim_cmd->add_option("--fp-score-max", sim.detector.fp_score_max)->capture_default_str();

  SweepFlags sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a grid of methods x thresholds as CSV");
  sweep_cmd->fallthrough();
  sweep_cmd->add_option("--annotations,-a", sw.annotations, "Annotation file")->required();
  sweep_cmd->add_option("--detections,-d", sw.detections, "Raw (pre-NMS) detection file")->required();
  sweep_cmd->add_option("--methods", sw.methods, "Comma-separated methods")->capture_default_str();
  sweep_cmd->add_option("--nt", sw.nts, "Comma-separated base thresholds")->capture_default_str();
  sweep_cmd->add_option("--sigma", sw.sigma)->capture_default_str();
  sweep_cmd->add_option("--score-floor", sw.score_floor)->capture_default_str();
  sweep_cmd->add_option("--density-source", sw.density_source, "oracle | self | provided")
      ->capture_default_str();
  sweep_cmd->add_option("--self-score-floor", sw.self_score_floor)->capture_default_str();
  sweep_cmd->add_option("--iou", sw.iou, "Match IoU threshold")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*suppress_cmd) return cmd_suppress(sup, globals, out, err);
    if (*eval_cmd) return cmd_eval(ev, globals, out, err);
    if (*density_cmd) return cmd_density(density_annotations, globals, out, err);
    if (*sim_cmd) return cmd_simulate(sim, globals, err);
    if (*sweep_cmd) return cmd_sweep(sw, globals, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace adnms::cli
