#include "depthup/cli.hpp"

#include "depthup/io.hpp"
#include "depthup/log.hpp"
#include "depthup/metrics.hpp"
#include "depthup/pipeline.hpp"
#include "depthup/weights.hpp"

#include <CLI11.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <map>

namespace depthup::cli {
namespace {

using nlohmann::json;

// Files written by one command; removed unless the command completes.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const fs::path& p : files_) fs::remove(p, ec);
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  fs::path add(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }
  json names() const {
    json out = json::array();
    for (const fs::path& p : files_) out.push_back(p.filename().string());
    return out;
  }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool committed_ = false;
};

json base_manifest(const std::string& command, const Config& config) {
  return {{"tool", "depthup"},
          {"command", command},
          {"config", config.to_json()},
          {"seeds", {{"scene", config.scene.seed}, {"acquisition", config.acquisition.seed}}}};
}

void finish(OutputSet& outputs, json& manifest, const json& timings) {
  const fs::path manifest_path = outputs.add("manifest.json");
  const fs::path timings_path = outputs.add("timings.json");
  manifest["outputs"] = outputs.names();
  io::write_text(manifest_path, manifest.dump(2) + "\n");
  io::write_text(timings_path, timings.dump(2) + "\n");
  outputs.commit();
}

std::string fmt(double v, int precision = 4) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", precision, v);
  return buf.data();
}

}  // namespace

json cmd_synth(const Config& config, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  const SyntheticFrame frame = synthesize(config);
  OutputSet outputs(out);
  io::write_depth(outputs.add("truth.pfm"), frame.truth);
  io::write_depth(outputs.add("truth.png"), frame.truth);
  io::write_intensity(outputs.add("intensity.pfm"), frame.intensity);
  io::write_intensity(outputs.add("intensity_preview.png"), frame.intensity);
  io::write_sparse(outputs.add("sparse.txt"), frame.sparse);
  io::export_colorized(frame.truth, outputs.add("truth_color.png"));

  json manifest = base_manifest("synth", config);
  manifest["frames"] = json::array({{{"frame_id", out.filename().string()},
                                     {"rows", frame.truth.rows()},
                                     {"cols", frame.truth.cols()},
                                     {"samples", frame.sparse.sample_count()},
                                     {"boxes", frame.scene.boxes.size()},
                                     {"stripes", frame.scene.stripes.size()}}});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finish(outputs, manifest, {{"total_s", secs}});
  log::info("samples: " + std::to_string(frame.sparse.sample_count()));
  return manifest;
}

json cmd_prior(const fs::path& frame_dir, const Config& config, const fs::path& out) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const io::FrameBundle frame = io::read_frame(frame_dir);
  const PriorBuild built = build_prior_detailed(frame.sparse, frame.intensity, config.prior);
  const WeightMasks weights = build_weights(built.prior, config.weight_stencil);

  OutputSet outputs(out);
  io::write_depth(outputs.add("coarse.pfm"), built.coarse);
  io::write_mask_png(outputs.add("edges.png"), built.edges.edge);
  outputs.add("prior_row.pfm");
  outputs.add("prior_col.pfm");
  io::write_prior(out, built.prior);

  json manifest = base_manifest("prior", config);
  manifest["inputs"] = {{"frame", frame_dir.string()}};
  manifest["frames"] = json::array({{{"frame_id", frame.frame_id},
                                     {"edge_pixels", built.edges.count()},
                                     {"prior_support", built.prior.support_size()},
                                     {"w1_zeros", (weights.w1.array() == 0.0).count()}}});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finish(outputs, manifest, {{"total_s", secs}});
  log::info("edge pixels: " + std::to_string(built.edges.count()) +
            ", prior support: " + std::to_string(built.prior.support_size()));
  return manifest;
}

json cmd_upsample(const fs::path& frame_dir, const Config& config, bool baseline, const fs::path& out) {
  const io::FrameBundle frame = io::read_frame(frame_dir);
  const Method method = baseline ? Method::baseline : Method::full;
  const Reconstruction rec = reconstruct(frame.sparse, frame.intensity, config, method);

  OutputSet outputs(out);
  io::write_depth(outputs.add("depth.pfm"), rec.depth);
  io::export_colorized(rec.depth, outputs.add("depth_color.png"));

  json record = {{"frame_id", frame.frame_id}, {"method", to_string(method)}};
  if (rec.report) record["convergence"] = io::to_json(*rec.report);
  if (rec.prior) record["prior_support"] = rec.prior->prior.support_size();
  if (frame.truth) record["metrics"] = io::to_json(evaluate(rec.depth, *frame.truth, *frame.eval_mask));

  json manifest = base_manifest("upsample", config);
  manifest["inputs"] = {{"frame", frame_dir.string()}, {"baseline", baseline}};
  manifest["frames"] = json::array({record});
  finish(outputs, manifest, {{"solve_s", rec.seconds}});

  std::string line = frame.frame_id + " " + to_string(method);
  if (rec.report) {
    line += " iterations=" + std::to_string(rec.report->iterations) +
            (rec.report->converged ? " converged" : " not-converged");
  }
  if (frame.truth) {
    line += " mae=" + fmt(record["metrics"]["mae"].get<double>()) +
            " rmse=" + fmt(record["metrics"]["rmse"].get<double>());
  }
  log::info(line);
  return manifest;
}

std::vector<EvalInput> collect_eval_batch(const fs::path& dir) {
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  std::vector<EvalInput> inputs;
  for (const fs::path& d : subdirs) {
    if (!fs::exists(d / "depth.pfm")) continue;
    fs::path truth = fs::exists(d / "truth.pfm") ? d / "truth.pfm" : d / "truth.png";
    if (!fs::exists(truth)) continue;
    inputs.push_back({d.filename().string(), d / "depth.pfm", truth, std::nullopt});
  }
  if (inputs.empty()) throw std::invalid_argument("eval: no frames with depth.pfm and truth under " + dir.string());
  return inputs;
}

json cmd_eval(const std::vector<EvalInput>& inputs, const fs::path& out) {
  if (inputs.empty()) throw std::invalid_argument("eval: nothing to evaluate");
  json rows = json::array();
  double sum_mae = 0.0, sum_rmse = 0.0;
  Index sum_pixels = 0;
  std::string csv = "frame_id,mae,rmse,n_pixels\n";
  for (const EvalInput& in : inputs) {
    const DepthGrid rec = io::read_depth(in.reconstruction);
    EvalMask mask;
    DepthGrid truth = [&] {
      if (in.truth.extension() == ".png") {
        io::DepthPng png = io::read_depth_png(in.truth);
        mask = png.valid;
        return std::move(png.depth);
      }
      DepthGrid t = io::read_depth(in.truth);
      mask = valid_truth_mask(t);
      return t;
    }();
    if (in.mask) mask = mask && io::read_mask_png(*in.mask);
    const ErrorMetrics m = evaluate(rec, truth, mask);
    rows.push_back({{"frame_id", in.frame_id}, {"mae", m.mae}, {"rmse", m.rmse}, {"n_pixels", m.pixels}});
    csv += in.frame_id + "," + fmt(m.mae, 6) + "," + fmt(m.rmse, 6) + "," + std::to_string(m.pixels) + "\n";
    sum_mae += m.mae;
    sum_rmse += m.rmse;
    sum_pixels += m.pixels;
    log::info(in.frame_id + " mae=" + fmt(m.mae) + " rmse=" + fmt(m.rmse) + " n=" + std::to_string(m.pixels));
  }
  const double k = static_cast<double>(inputs.size());
  const json mean = {{"frame_id", "mean"}, {"mae", sum_mae / k}, {"rmse", sum_rmse / k}, {"n_pixels", sum_pixels}};
  rows.push_back(mean);
  csv += "mean," + fmt(sum_mae / k, 6) + "," + fmt(sum_rmse / k, 6) + "," + std::to_string(sum_pixels) + "\n";
  log::info("mean mae=" + fmt(sum_mae / k) + " rmse=" + fmt(sum_rmse / k));

  OutputSet outputs(out);
  io::write_text(outputs.add("metrics.csv"), csv);
  json manifest = {{"tool", "depthup"}, {"command", "eval"}, {"frames", rows}};
  json inputs_json = json::array();
  for (const EvalInput& in : inputs) {
    inputs_json.push_back({{"frame_id", in.frame_id},
                           {"reconstruction", in.reconstruction.string()},
                           {"truth", in.truth.string()},
                           {"mask", in.mask ? in.mask->string() : ""}});
  }
  manifest["inputs"] = inputs_json;
  finish(outputs, manifest, json::object());
  return manifest;
}

json cmd_compare(const fs::path& frame_dir, const Config& config, const fs::path& out) {
  const io::FrameBundle frame = io::read_frame(frame_dir);
  if (!frame.truth) throw std::invalid_argument("compare: frame has no truth depth");

  OutputSet outputs(out);
  json rows = json::array();
  json timings = json::object();
  for (const Method method : {Method::full, Method::baseline, Method::nearest}) {
    const Reconstruction rec = reconstruct(frame.sparse, frame.intensity, config, method);
    const std::string name = to_string(method);
    io::write_depth(outputs.add("depth_" + name + ".pfm"), rec.depth);
    const ErrorMetrics m = evaluate(rec.depth, *frame.truth, *frame.eval_mask);
    json row = {{"method", name}, {"mae", m.mae}, {"rmse", m.rmse}, {"n_pixels", m.pixels}};
    if (rec.report) row["convergence"] = io::to_json(*rec.report);
    rows.push_back(row);
    timings[name + "_s"] = rec.seconds;
  }

  json manifest = base_manifest("compare", config);
  manifest["inputs"] = {{"frame", frame_dir.string()}};
  manifest["frame_id"] = frame.frame_id;
  manifest["methods"] = rows;
  const std::string table = format_compare_table(manifest);
  io::write_text(outputs.add("compare.txt"), table);
  finish(outputs, manifest, timings);
  log::info(table);
  return manifest;
}

std::string format_compare_table(const json& manifest) {
  const json& rows = manifest.at("methods");
  double best_mae = std::numeric_limits<double>::infinity();
  double best_rmse = std::numeric_limits<double>::infinity();
  for (const json& r : rows) {
    best_mae = std::min(best_mae, r.at("mae").get<double>());
    best_rmse = std::min(best_rmse, r.at("rmse").get<double>());
  }
  std::string out = "method      MAE (m)     RMSE (m)\n";
  for (const json& r : rows) {
    const double mae_v = r.at("mae").get<double>(), rmse_v = r.at("rmse").get<double>();
    std::array<char, 128> buf{};
    std::snprintf(buf.data(), buf.size(), "%-10s %8.4f%s %10.4f%s\n", r.at("method").get<std::string>().c_str(),
                  mae_v, mae_v == best_mae ? "*" : " ", rmse_v, rmse_v == best_rmse ? "*" : " ");
    out += buf.data();
  }
  return out;
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv) {
  CLI::App app{"Depth upsampling from sparse samples guided by an intensity image"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  bool baseline = false, quiet = false;
  app.add_option("--config", config_path, "Config file (section.key = value lines)");
  app.add_option("--preset", preset, "Parameter preset: synthia or kitti");
  app.add_option("--seed", seed, "Seed for scene generation and sampling");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--baseline", baseline, "Second-difference term only (no informing prior)");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  // One flag per config key; flags win over the config file.
  std::map<std::string, std::string> overrides;
  for (const std::string& key : Config::keys()) {
    app.add_option_function<std::string>(
           "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
           "Config value " + key)
        ->group("Config keys");
  }

  std::string frame_dir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic frame (truth, intensity, sparse samples)");
  auto* prior = app.add_subcommand("prior", "Build the informing prior for a frame");
  prior->add_option("frame", frame_dir, "Frame directory")->required();
  auto* upsample = app.add_subcommand("upsample", "Reconstruct dense depth for a frame");
  upsample->add_option("frame", frame_dir, "Frame directory")->required();
  auto* compare = app.add_subcommand("compare", "Compare full method, baseline and nearest fill");
  compare->add_option("frame", frame_dir, "Frame directory")->required();

  auto* eval = app.add_subcommand("eval", "MAE/RMSE of reconstructions against truth");
  std::string recon_path, truth_path, mask_path, batch_dir, frame_id = "frame";
  eval->add_option("--recon", recon_path, "Reconstructed depth (.pfm/.png)");
  eval->add_option("--truth", truth_path, "Ground-truth depth (.pfm/.png)");
  eval->add_option("--mask", mask_path, "Optional evaluation mask PNG");
  eval->add_option("--frame-id", frame_id, "Frame id for the record");
  eval->add_option("--batch", batch_dir, "Directory of frame subdirectories (depth.pfm + truth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  log::level() = quiet ? log::Level::quiet : log::Level::normal;
  try {
    Config config = preset.empty() ? Config{} : Config::preset(preset);
    if (!config_path.empty()) config.merge_text(io::read_text(config_path));
    if (seed) {
      config.scene.seed = *seed;
      config.acquisition.seed = *seed;
    }
    for (const auto& [key, value] : overrides) config.set(key, value);
    config.validate();

    const fs::path out(out_dir);
    if (*synth) {
      cmd_synth(config, out);
    } else if (*prior) {
      cmd_prior(frame_dir, config, out);
    } else if (*upsample) {
      cmd_upsample(frame_dir, config, baseline, out);
    } else if (*compare) {
      cmd_compare(frame_dir, config, out);
    } else if (*eval) {
      std::vector<EvalInput> inputs;
      if (!batch_dir.empty()) {
        inputs = collect_eval_batch(batch_dir);
      } else {
        if (recon_path.empty() || truth_path.empty()) {
          throw std::invalid_argument("eval: need --recon and --truth, or --batch");
        }
        inputs.push_back({frame_id, recon_path, truth_path,
                          mask_path.empty() ? std::nullopt : std::optional<fs::path>(mask_path)});
      }
      cmd_eval(inputs, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace depthup::cli
