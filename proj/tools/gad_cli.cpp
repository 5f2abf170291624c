// gad: command-line front end for guided anisotropic diffusion.
//
// Exit codes: 0 success, 1 file or format errors, 2 usage or validation errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gad/bench.hpp"
#include "gad/diffusion.hpp"
#include "gad/errors.hpp"
#include "gad/labels.hpp"
#include "gad/metrics.hpp"
#include "gad/parallel.hpp"
#include "gad/raster_io.hpp"
#include "gad/synth.hpp"
#include "gad/upsample.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct GadOptions {
  double k = gad::GadParams::unit_range().k;
  double lambda = gad::GadParams::unit_range().lambda;
  int iterations = gad::GadParams::unit_range().iterations;
  int threads = 0;

  gad::GadParams params() const {
    gad::GadParams p{k, lambda, iterations};
    p.validate();
    return p;
  }
};

void add_gad_options(CLI::App* cmd, GadOptions& o) {
  cmd->add_option("--K", o.k, "edge-stopping constant (guide units)")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "step size, at most 0.25")->capture_default_str();
  cmd->add_option("--iters", o.iterations, "number of iterations N")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads, 0 = auto")->capture_default_str();
}

json params_json(const GadOptions& o) {
  return {{"K", o.k}, {"lambda", o.lambda}, {"iterations", o.iterations}, {"threads", gad::num_threads()}};
}

std::vector<std::string> path_strings(const std::vector<fs::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

class Stopwatch {
public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void write_manifest(const fs::path& output, json manifest) {
  const fs::path path = output.string() + ".manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw gad::IoError("cannot write manifest " + path.string());
}

std::vector<gad::MultiChannelField> read_guides(const std::vector<fs::path>& paths) {
  std::vector<gad::MultiChannelField> guides;
  for (const auto& p : paths) guides.push_back(gad::io::read_field(p));
  return guides;
}

// ---------------------------------------------------------------- gad

struct GadCmd {
  fs::path target;
  std::vector<fs::path> guides;
  fs::path out;
  GadOptions gad;
};

int run_gad(const GadCmd& o) {
  const auto params = o.gad.params();
  Stopwatch sw;
  const auto target = gad::io::read_field(o.target);
  const auto guides = read_guides(o.guides);
  const double t_read = sw.lap();
  const auto result = gad::gad_filter(target, guides, params);
  const double t_filter = sw.lap();
  gad::io::write_field(result, o.out);
  const double t_write = sw.lap();
  write_manifest(o.out, {{"subcommand", "gad"},
                         {"params", params_json(o.gad)},
                         {"inputs", {{"target", o.target.string()}, {"guides", path_strings(o.guides)}}},
                         {"outputs", {o.out.string()}},
                         {"timings_s", {{"read", t_read}, {"filter", t_filter}, {"write", t_write}}}});
  return kExitOk;
}

// ---------------------------------------------------------------- cleanse

struct CleanseCmd {
  fs::path gt, prob;
  std::vector<fs::path> guides;
  std::string strategy = "intersection";
  double threshold = 0.5;
  fs::path out;
  std::optional<fs::path> truth;
  GadOptions gad;
};

int run_cleanse(const CleanseCmd& o) {
  const auto strategy = gad::parse_merge_strategy(o.strategy);
  const auto params = o.gad.params();
  Stopwatch sw;
  const auto gt = gad::io::read_labels(o.gt);
  const auto prob = gad::io::read_field(o.prob);
  if (prob.channels() != 1) throw gad::ShapeError("probability raster must have one channel");
  const auto guides = read_guides(o.guides);
  std::optional<gad::LabelMap> truth;
  if (o.truth) truth = gad::io::read_labels(*o.truth);
  const double t_read = sw.lap();
  const auto merged = gad::cleanse(gt, prob[0], guides, params, strategy, o.threshold);
  const double t_cleanse = sw.lap();
  gad::io::write_labels(merged, o.out);
  const double t_write = sw.lap();

  json report;
  if (truth) {
    const double before = gad::dice(gad::confusion(gt, *truth), 1);
    const double after = gad::dice(gad::confusion(merged, *truth), 1);
    std::printf("dice_before=%.17g\ndice_after=%.17g\ndice_gain=%.17g\n", before, after, after - before);
    report = {{"truth", o.truth->string()},
              {"dice_before", before},
              {"dice_after", after}};
  }
  json inputs{{"gt", o.gt.string()}, {"prob", o.prob.string()}, {"guides", path_strings(o.guides)}};
  write_manifest(o.out, {{"subcommand", "cleanse"},
                         {"params", params_json(o.gad)},
                         {"strategy", o.strategy},
                         {"threshold", o.threshold},
                         {"inputs", inputs},
                         {"outputs", {o.out.string()}},
                         {"report", report},
                         {"timings_s", {{"read", t_read}, {"cleanse", t_cleanse}, {"write", t_write}}}});
  return kExitOk;
}

// ---------------------------------------------------------------- merge

struct MergeCmd {
  fs::path original, prediction, out;
  std::string strategy = "intersection";
};

int run_merge(const MergeCmd& o) {
  const auto strategy = gad::parse_merge_strategy(o.strategy);
  Stopwatch sw;
  const auto original = gad::io::read_labels(o.original);
  const auto prediction = gad::io::read_labels(o.prediction);
  const auto merged = gad::merge(original, prediction, strategy);
  gad::io::write_labels(merged, o.out);
  write_manifest(o.out, {{"subcommand", "merge"},
                         {"strategy", o.strategy},
                         {"inputs", {{"original", o.original.string()}, {"prediction", o.prediction.string()}}},
                         {"outputs", {o.out.string()}},
                         {"timings_s", {{"total", sw.lap()}}}});
  return kExitOk;
}

// ---------------------------------------------------------------- refine

struct RefineCmd {
  std::vector<fs::path> probs;
  fs::path guide, out;
  std::optional<fs::path> probs_out;
  int ss = 1;
  GadOptions gad;
};

int run_refine(const RefineCmd& o) {
  const gad::RefinePipelineConfig config{o.ss, o.gad.params()};
  config.validate();
  Stopwatch sw;
  const auto probs = gad::io::read_stacked(o.probs);
  const auto guide = gad::io::read_field(o.guide);
  const double t_read = sw.lap();
  const auto result = gad::refine_upsampled(probs, guide, config);
  const double t_refine = sw.lap();
  gad::io::write_labels(result.labels, o.out);
  std::vector<std::string> outputs{o.out.string()};
  if (o.probs_out) {
    // PFM holds 1 or 3 channels, so refined probabilities go one file per class.
    for (int c = 0; c < result.probs.channels(); ++c) {
      fs::path p = *o.probs_out;
      p.replace_filename(p.stem().string() + "_c" + std::to_string(c) + p.extension().string());
      gad::io::write_field(gad::MultiChannelField(result.probs[c]), p);
      outputs.push_back(p.string());
    }
  }
  const double t_write = sw.lap();
  write_manifest(o.out, {{"subcommand", "refine"},
                         {"params", params_json(o.gad)},
                         {"ss", o.ss},
                         {"inputs", {{"probs", path_strings(o.probs)}, {"guide", o.guide.string()}}},
                         {"outputs", outputs},
                         {"timings_s", {{"read", t_read}, {"refine", t_refine}, {"write", t_write}}}});
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalCmd {
  fs::path pred, truth;
  int num_classes = 2;
  int ignore_id = gad::kDefaultIgnoreId;
  int boundary_radius = 3;
  std::optional<fs::path> json_out;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_eval(const EvalCmd& o) {
  if (o.boundary_radius < 0) throw gad::InvalidArgument("--boundary-radius must be >= 0");
  const auto pred = gad::io::read_labels(o.pred, o.num_classes, o.ignore_id);
  const auto truth = gad::io::read_labels(o.truth, o.num_classes, o.ignore_id);
  const auto band = gad::boundary_mask(truth, o.boundary_radius);

  json doc{{"pred", o.pred.string()}, {"truth", o.truth.string()}, {"boundary_radius", o.boundary_radius}};
  auto report = [&](const std::string& prefix, const gad::ConfusionCounts& counts) {
    auto emit = [&](const std::string& key, std::optional<double> v) {
      std::cout << prefix << key << '=' << (v ? fmt(*v) : "undefined") << '\n';
      doc[prefix + key] = v ? json(*v) : json(nullptr);
    };
    auto safe = [](auto f) -> std::optional<double> {
      try {
        return f();
      } catch (const gad::UndefinedMetric&) {
        return std::nullopt;
      }
    };
    emit("accuracy", safe([&] { return gad::global_accuracy(counts); }));
    for (int c = 0; c < o.num_classes; ++c)
      emit("dice_" + std::to_string(c), safe([&] { return gad::dice(counts, c); }));
    // Headline Dice is the foreground (class 1) score.
    emit("dice", safe([&] { return gad::dice(counts, o.num_classes > 1 ? 1 : 0); }));
  };
  report("", gad::confusion(pred, truth));
  report("boundary_", gad::confusion(pred, truth, band));

  if (o.json_out) {
    std::ofstream out(*o.json_out);
    out << doc.dump(2) << '\n';
    if (!out) throw gad::IoError("cannot write " + o.json_out->string());
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthCmd {
  std::string scenario;
  std::uint64_t seed = 1;
  fs::path out_dir = ".";
  int ss = 8;
};

int run_synth(const SynthCmd& o) {
  if (o.ss < 1) throw gad::InvalidArgument("--ss must be >= 1");
  fs::create_directories(o.out_dir);
  std::vector<std::string> outputs;
  auto put_field = [&](const gad::MultiChannelField& f, const std::string& name) {
    gad::io::write_field(f, o.out_dir / name);
    outputs.push_back((o.out_dir / name).string());
  };
  auto put_labels = [&](const gad::LabelMap& l, const std::string& name) {
    gad::io::write_labels(l, o.out_dir / name);
    outputs.push_back((o.out_dir / name).string());
  };
  json params;
  if (o.scenario == "square") {
    gad::synth::SquareOptions opts;
    opts.seed = o.seed;
    const auto sc = gad::synth::make_square(opts);
    put_field(sc.guide, "guide.pfm");
    put_labels(sc.truth, "truth.png");
    put_labels(sc.noisy_labels, "noisy_labels.png");
    put_field(gad::MultiChannelField(sc.noisy_prob), "noisy_prob.pfm");
    params = {{"size", opts.size}, {"side", opts.side}, {"dilation", opts.dilation},
              {"contrast", opts.contrast}, {"noise_sigma", opts.noise_sigma}};
  } else if (o.scenario == "disk") {
    gad::synth::DiskOptions opts;
    opts.seed = o.seed;
    const auto sc = gad::synth::make_disk(opts);
    put_field(sc.guide, "guide.pfm");
    put_labels(sc.truth, "truth.png");
    const auto low = gad::simulate_low_res(sc.truth_onehot, o.ss);
    for (int c = 0; c < sc.truth_onehot.channels(); ++c) {
      put_field(gad::MultiChannelField(sc.truth_onehot[c]), "truth_c" + std::to_string(c) + ".pfm");
      put_field(gad::MultiChannelField(low[c]), "low_c" + std::to_string(c) + ".pfm");
    }
    params = {{"size", opts.size}, {"radius", opts.radius}, {"center_jitter", opts.center_jitter},
              {"contrast", opts.contrast}, {"noise_sigma", opts.noise_sigma}, {"ss", o.ss}};
  } else {
    throw gad::InvalidArgument("unknown scenario '" + o.scenario + "' (expected square or disk)");
  }
  write_manifest(o.out_dir / o.scenario,
                 {{"subcommand", "synth"}, {"scenario", o.scenario}, {"seed", o.seed},
                  {"params", params}, {"outputs", outputs}});
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchCmd {
  gad::BenchConfig config;
  bool json_output = false;
};

// Published single-GPU time for 512 x 512, 100 iterations; context only.
constexpr double kPublishedGpuMs = 230.0;

int run_bench(const BenchCmd& o) {
  const auto r = gad::run_benchmark(o.config);
  const bool agree = r.max_abs_diff_reference < 1e-9;
  if (o.json_output) {
    json doc{{"size", r.size},
             {"iterations", r.iterations},
             {"threads_multi", r.threads_multi},
             {"seconds_single", r.seconds_single},
             {"seconds_multi", r.seconds_multi},
             {"seconds_reference", r.seconds_reference},
             {"mpix_per_s_single", r.mpix_per_s_single},
             {"mpix_per_s_multi", r.mpix_per_s_multi},
             {"max_abs_diff_reference", r.max_abs_diff_reference},
             {"multi_matches_single", r.multi_matches_single},
             {"published_gpu_ms", kPublishedGpuMs}};
    std::cout << doc.dump(2) << '\n';
  } else {
    std::printf("size=%d\niterations=%d\n", r.size, r.iterations);
    std::printf("single_thread_s=%.4f\nsingle_thread_mpix_per_s=%.2f\n", r.seconds_single, r.mpix_per_s_single);
    std::printf("threads=%d\nmulti_thread_s=%.4f\nmulti_thread_mpix_per_s=%.2f\n", r.threads_multi,
                r.seconds_multi, r.mpix_per_s_multi);
    std::printf("multi_matches_single=%s\n", r.multi_matches_single ? "true" : "false");
    if (o.config.run_reference)
      std::printf("reference_s=%.4f\nmax_abs_diff_reference=%.3g\n", r.seconds_reference,
                  r.max_abs_diff_reference);
    std::printf("published_gpu_ms=%.0f (published GPU figure, context only)\n", kPublishedGpuMs);
  }
  if (!r.multi_matches_single || (o.config.run_reference && !agree)) {
    std::fprintf(stderr, "gad: kernel agreement check failed\n");
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guided anisotropic diffusion tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gad 0.1.0");

  GadCmd gad_cmd;
  auto* c_gad = app.add_subcommand("gad", "filter a target raster with one or more guides");
  c_gad->add_option("target", gad_cmd.target, "target raster")->required();
  c_gad->add_option("guides", gad_cmd.guides, "guide rasters")->required();
  c_gad->add_option("--out,-o", gad_cmd.out, "output raster (.pfm or .png)")->required();
  add_gad_options(c_gad, gad_cmd.gad);

  CleanseCmd cl;
  auto* c_cl = app.add_subcommand("cleanse", "filter a label probability map and merge with the labels");
  c_cl->add_option("gt", cl.gt, "original label map (PNG)")->required();
  c_cl->add_option("prob", cl.prob, "change probability raster")->required();
  c_cl->add_option("guides", cl.guides, "guide rasters")->required();
  c_cl->add_option("--strategy", cl.strategy, "intersection | ignore-fn | ignore-all")->capture_default_str();
  c_cl->add_option("--threshold", cl.threshold, "binarisation threshold")->capture_default_str();
  c_cl->add_option("--truth", cl.truth, "clean labels; prints the Dice before and after");
  c_cl->add_option("--out,-o", cl.out, "merged label map (PNG)")->required();
  add_gad_options(c_cl, cl.gad);

  MergeCmd mg;
  auto* c_mg = app.add_subcommand("merge", "merge original labels with a prediction");
  c_mg->add_option("original", mg.original)->required();
  c_mg->add_option("prediction", mg.prediction)->required();
  c_mg->add_option("--strategy", mg.strategy, "intersection | ignore-fn | ignore-all")->capture_default_str();
  c_mg->add_option("--out,-o", mg.out)->required();

  RefineCmd rf;
  auto* c_rf = app.add_subcommand("refine", "upsample class probabilities and refine them with a guide");
  c_rf->add_option("--probs", rf.probs, "low-resolution probability rasters, channels stacked in order")
      ->required();
  c_rf->add_option("--guide", rf.guide, "high-resolution guide")->required();
  c_rf->add_option("--ss", rf.ss, "subsampling ratio")->capture_default_str();
  c_rf->add_option("--out,-o", rf.out, "label map (PNG)")->required();
  c_rf->add_option("--probs-out", rf.probs_out, "refined probabilities, written as <stem>_c<k><ext>");
  add_gad_options(c_rf, rf.gad);

  EvalCmd ev;
  auto* c_ev = app.add_subcommand("eval", "Dice and accuracy, overall and in the boundary band");
  c_ev->add_option("pred", ev.pred)->required();
  c_ev->add_option("truth", ev.truth)->required();
  c_ev->add_option("--boundary-radius", ev.boundary_radius, "band radius in pixels")->capture_default_str();
  c_ev->add_option("--classes", ev.num_classes, "number of semantic classes")->capture_default_str();
  c_ev->add_option("--ignore-id", ev.ignore_id, "ignore label id")->capture_default_str();
  c_ev->add_option("--json", ev.json_out, "also write the metrics as JSON");

  SynthCmd sy;
  auto* c_sy = app.add_subcommand("synth", "generate a seeded synthetic scenario");
  c_sy->add_option("scenario", sy.scenario, "square | disk")->required()->check(CLI::IsMember({"square", "disk"}));
  c_sy->add_option("--seed", sy.seed)->capture_default_str();
  c_sy->add_option("--out-dir", sy.out_dir)->capture_default_str();
  c_sy->add_option("--ss", sy.ss, "subsampling for the disk's low-resolution probabilities")
      ->capture_default_str();

  BenchCmd bn;
  auto* c_bn = app.add_subcommand("bench", "time the diffusion kernels");
  c_bn->add_option("--size", bn.config.size)->capture_default_str();
  c_bn->add_option("--iters", bn.config.iterations)->capture_default_str();
  c_bn->add_option("--threads", bn.config.threads, "threads for the multi-threaded run, 0 = auto")
      ->capture_default_str();
  c_bn->add_option("--seed", bn.config.seed)->capture_default_str();
  c_bn->add_flag("!--no-reference", bn.config.run_reference, "skip the reference-kernel comparison");
  c_bn->add_flag("--json", bn.json_output, "print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto threads_of = [&]() -> int {
      if (c_gad->parsed()) return gad_cmd.gad.threads;
      if (c_cl->parsed()) return cl.gad.threads;
      if (c_rf->parsed()) return rf.gad.threads;
      return 0;
    };
    gad::set_num_threads(threads_of());

    if (c_gad->parsed()) return run_gad(gad_cmd);
    if (c_cl->parsed()) return run_cleanse(cl);
    if (c_mg->parsed()) return run_merge(mg);
    if (c_rf->parsed()) return run_refine(rf);
    if (c_ev->parsed()) return run_eval(ev);
    if (c_sy->parsed()) return run_synth(sy);
    if (c_bn->parsed()) return run_bench(bn);
  } catch (const gad::IoError& e) {
    std::cerr << "gad: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gad: " << e.what() << '\n';
    return kExitIo;
  } catch (const gad::Error& e) {
    std::cerr << "gad: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
