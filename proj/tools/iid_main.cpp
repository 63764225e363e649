// Copyright 2026 The iid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: shadowfree / specularfree / decompose / eval /
// synth / attention. Every command resolves its configuration (flags win
// over --config file), processes inputs (optionally across --jobs threads),
// writes outputs atomically (temp file + rename), and finishes with a
// manifest.json capturing tool version, configuration, input hashes, and
// outputs. Manifests are byte-identical across reruns except for the
// "timing" object.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "iid/aware.hpp"
#include "iid/imageio.hpp"
#include "iid/metrics.hpp"
#include "iid/shadowfree.hpp"
#include "iid/solver.hpp"
#include "iid/specularfree.hpp"
#include "iid/synth.hpp"
#include "iid/version.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --- plumbing -------------------------------------------------------------

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw iid::IoError("cannot open '" + path + "' for hashing");
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string temp_name(const std::string& path) {
  const fs::path p(path);
  return (p.parent_path() / (".tmp-" + p.filename().string())).string();
}

// Write via a temp file in the same directory, then rename into place so
// concurrent jobs and interrupted runs never leave partial outputs.
void atomic_write(const std::string& path,
                  const std::function<void(const std::string&)>& writer) {
  const std::string tmp = temp_name(path);
  writer(tmp);
  fs::rename(tmp, path);
}

void atomic_write_text(const std::string& path, const std::string& text) {
  atomic_write(path, [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw iid::IoError("cannot open '" + tmp + "' for writing");
    out << text;
    if (!out) throw iid::IoError("failed to write '" + tmp + "'");
  });
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw iid::IoError("cannot create output directory '" + dir + "'");
}

void run_parallel(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min<std::size_t>(jobs, n);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Timing {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  json finish() const {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ",
                  std::gmtime(&tt));
    return json{{"wall_ms", ms}, {"completed_utc", stamp}};
  }
};

// All volatile fields live under "timing"; everything else must be
// reproducible.
void write_manifest(const std::string& out_dir, const std::string& command,
                    json config, json inputs, json outputs, json results,
                    const Timing& timing) {
  json m{{"tool", "iid"},
         {"version", iid::kVersion},
         {"command", command},
         {"config", std::move(config)},
         {"inputs", std::move(inputs)},
         {"outputs", std::move(outputs)},
         {"results", std::move(results)},
         {"timing", timing.finish()}};
  atomic_write_text(out_dir + "/manifest.json", m.dump(2) + "\n");
}

json input_record(const std::string& path) {
  return json{{"path", path}, {"fnv1a64", fnv1a64_file(path)}};
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

void save_png16(const iid::Image& img, const std::string& path, bool srgb,
                int bit_depth) {
  atomic_write(path, [&](const std::string& tmp) {
    iid::save_image(img, tmp, srgb, bit_depth);
  });
}

// Layers can exceed 1; record the divisor used to fit them into a PNG.
double layer_scale(const iid::Image& img) {
  double mx = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i)
    mx = std::max(mx, img.data()[i]);
  return mx > 1.0 ? mx : 1.0;
}

iid::Image scaled_by(const iid::Image& img, double scale) {
  if (scale == 1.0) return img;
  iid::Image out(img.height(), img.width(), img.channels());
  for (std::size_t i = 0; i < img.size(); ++i)
    out.data()[i] = img.data()[i] / scale;
  return out;
}

// --- shared option bundles ------------------------------------------------

struct CommonOpts {
  std::string out_dir;
  int jobs = 1;
  bool srgb = false;
  int bit_depth = 16;
};

void add_common(CLI::App* cmd, CommonOpts* o, bool with_images = true) {
  cmd->add_option("-o,--out", o->out_dir, "Output directory")->required();
  cmd->add_option("-j,--jobs", o->jobs, "Worker threads for multiple inputs")
      ->check(CLI::Range(1, 64));
  if (with_images) {
    cmd->add_flag("--srgb", o->srgb,
                  "Treat files as sRGB-encoded (decode on load, encode on "
                  "save); default is linear");
    cmd->add_option("--bit-depth", o->bit_depth, "Output PNG bit depth")
        ->check(CLI::IsMember({8, 16}));
  }
}

json common_config(const CommonOpts& o, bool with_images = true) {
  json c{{"out", o.out_dir}, {"jobs", o.jobs}};
  if (with_images) {
    c["srgb"] = o.srgb;
    c["bit_depth"] = o.bit_depth;
  }
  return c;
}

// --- shadowfree -----------------------------------------------------------

int run_shadowfree(const std::vector<std::string>& inputs,
                   const CommonOpts& common, std::optional<double> theta) {
  Timing timing;
  ensure_out_dir(common.out_dir);
  json outputs = json::array();
  json results = json::array();
  std::vector<json> per_input(inputs.size());
  std::vector<std::vector<std::string>> per_files(inputs.size());

  run_parallel(inputs.size(), common.jobs, [&](std::size_t i) {
    const std::string& path = inputs[i];
    const std::string stem = stem_of(path);
    const iid::Image img = iid::load_image(path, common.srgb);
    const iid::LogChromaticity lc = iid::log_chromaticity(img);
    const iid::EntropyProfile profile = iid::entropy_profile(lc);
    const double used_theta =
        theta ? *theta : iid::min_entropy_angle(profile);

    std::ostringstream csv;
    csv << "angle_deg,entropy_bits\n";
    for (int a = 0; a < 180; ++a)
      csv << a << "," << profile.entropy_bits[a] << "\n";
    const std::string csv_path = common.out_dir + "/" + stem + "_entropy.csv";
    atomic_write_text(csv_path, csv.str());

    const std::string gray_path =
        common.out_dir + "/" + stem + "_invariant.png";
    save_png16(iid::invariant_grayscale(lc, used_theta), gray_path,
               common.srgb, common.bit_depth);
    const std::string color_path =
        common.out_dir + "/" + stem + "_shadowfree.png";
    save_png16(iid::colored_shadowfree(img, used_theta), color_path,
               common.srgb, common.bit_depth);

    per_files[i] = {csv_path, gray_path, color_path};
    per_input[i] = json{{"input", path},
                        {"theta_deg", used_theta},
                        {"theta_source", theta ? "manual" : "entropy"}};
  });

  json in_records = json::array();
  for (const auto& p : inputs) in_records.push_back(input_record(p));
  for (const auto& files : per_files)
    for (const auto& f : files) outputs.push_back(f);
  for (auto& r : per_input) results.push_back(std::move(r));

  json config = common_config(common);
  if (theta) config["theta"] = *theta;
  write_manifest(common.out_dir, "shadowfree", config, in_records, outputs,
                 results, timing);
  return 0;
}

// --- specularfree ---------------------------------------------------------

int run_specularfree(const std::vector<std::string>& inputs,
                     const CommonOpts& common, double lambda) {
  Timing timing;
  ensure_out_dir(common.out_dir);
  std::vector<json> per_input(inputs.size());
  std::vector<std::vector<std::string>> per_files(inputs.size());

  run_parallel(inputs.size(), common.jobs, [&](std::size_t i) {
    const std::string& path = inputs[i];
    const std::string stem = stem_of(path);
    const iid::Image img = iid::load_image(path, common.srgb);
    const iid::SpecularFreeResult res = iid::specular_free_full(img, lambda);

    const std::string color_path =
        common.out_dir + "/" + stem + "_specfree.png";
    save_png16(res.image, color_path, common.srgb, common.bit_depth);
    const std::string gray_path =
        common.out_dir + "/" + stem + "_specfree_gray.png";
    save_png16(iid::luminance(res.image), gray_path, common.srgb,
               common.bit_depth);

    per_files[i] = {color_path, gray_path};
    per_input[i] = json{{"input", path},
                        {"clamp_fraction", res.clamp_fraction}};
  });

  json in_records = json::array();
  for (const auto& p : inputs) in_records.push_back(input_record(p));
  json outputs = json::array();
  for (const auto& files : per_files)
    for (const auto& f : files) outputs.push_back(f);
  json results = json::array();
  for (auto& r : per_input) results.push_back(std::move(r));

  json config = common_config(common);
  config["lambda"] = lambda;
  write_manifest(common.out_dir, "specularfree", config, in_records, outputs,
                 results, timing);
  return 0;
}

// --- decompose ------------------------------------------------------------

struct DecomposeOpts {
  iid::SolverConfig solver;
  iid::LossWeights weights;
  std::string init = "from_input";
};

int run_decompose(const std::vector<std::string>& inputs,
                  const CommonOpts& common, const DecomposeOpts& opts) {
  Timing timing;
  ensure_out_dir(common.out_dir);
  iid::SolverConfig solver = opts.solver;
  if (opts.init == "from_priors") {
    solver.init = iid::SolverConfig::Init::from_priors;
  } else if (opts.init == "from_input") {
    solver.init = iid::SolverConfig::Init::from_input;
  } else {
    throw iid::InvalidParameter("init must be from_input or from_priors");
  }

  std::vector<json> per_input(inputs.size());
  std::vector<std::vector<std::string>> per_files(inputs.size());
  run_parallel(inputs.size(), common.jobs, [&](std::size_t i) {
    const std::string& path = inputs[i];
    const std::string stem = stem_of(path);
    const iid::Image img = iid::load_image(path, common.srgb);
    const iid::DecompositionResult res =
        iid::decompose(img, opts.weights, solver);

    const double r_scale = layer_scale(res.reflectance);
    const double s_scale = layer_scale(res.shading);
    const std::string r_path =
        common.out_dir + "/" + stem + "_reflectance.png";
    const std::string s_path = common.out_dir + "/" + stem + "_shading.png";
    save_png16(scaled_by(res.reflectance, r_scale), r_path, common.srgb,
               common.bit_depth);
    save_png16(scaled_by(res.shading, s_scale), s_path, common.srgb,
               common.bit_depth);

    std::ostringstream csv;
    csv << "iter,objective\n";
    for (std::size_t t = 0; t < res.trace.size(); ++t)
      csv << t << "," << std::setprecision(17) << res.trace[t] << "\n";
    const std::string trace_path =
        common.out_dir + "/" + stem + "_trace.csv";
    atomic_write_text(trace_path, csv.str());

    per_files[i] = {r_path, s_path, trace_path};
    per_input[i] = json{
        {"input", path},
        {"theta_deg", res.theta_deg},
        {"theta_source", solver.theta_deg ? "manual" : "entropy"},
        {"converged", res.converged},
        {"iterations", res.iterations},
        {"reconstruction_residual", res.reconstruction_residual},
        {"reflectance_scale", r_scale},
        {"shading_scale", s_scale},
        {"objective",
         {{"total", res.final_terms.total},
          {"sf", res.final_terms.sf},
          {"hf", res.final_terms.hf},
          {"grad", res.final_terms.grad},
          {"smooth", res.final_terms.smooth},
          {"sparse", res.final_terms.sparse},
          {"rec", res.final_terms.rec}}}};
    if (!res.converged)
      std::cerr << "warning: '" << path
                << "' did not converge within the iteration budget\n";
  });

  json in_records = json::array();
  for (const auto& p : inputs) in_records.push_back(input_record(p));
  json outputs = json::array();
  for (const auto& files : per_files)
    for (const auto& f : files) outputs.push_back(f);
  json results = json::array();
  for (auto& r : per_input) results.push_back(std::move(r));

  json config = common_config(common);
  config["init"] = opts.init;
  config["max_iters"] = solver.max_iters;
  config["step_size"] = solver.step_size;
  config["step_decay"] = solver.step_decay;
  config["plateau_iters"] = solver.plateau_iters;
  config["converge_rel"] = solver.converge_rel;
  config["converge_window"] = solver.converge_window;
  config["lambda"] = solver.lambda;
  if (solver.theta_deg) config["theta"] = *solver.theta_deg;
  config["weights"] = json{{"sf", opts.weights.sf},
                           {"hf", opts.weights.hf},
                           {"grad", opts.weights.grad},
                           {"smooth", opts.weights.smooth},
                           {"sparse", opts.weights.sparse},
                           {"rec", opts.weights.rec}};
  write_manifest(common.out_dir, "decompose", config, in_records, outputs,
                 results, timing);
  return 0;
}

// --- eval -----------------------------------------------------------------

// A path argument may be one file or a directory; directories pair entries
// by file stem.
std::vector<std::pair<std::string, std::string>> pair_inputs(
    const std::string& pred, const std::string& other,
    const std::string& other_kind) {
  if (!fs::is_directory(pred)) {
    if (fs::is_directory(other))
      throw iid::InvalidInput(
          "eval: cannot pair a single file with a directory");
    return {{pred, other}};
  }
  if (!fs::is_directory(other))
    throw iid::InvalidInput("eval: '" + other + "' is not a directory");
  std::vector<std::string> preds;
  for (const auto& e : fs::directory_iterator(pred))
    if (e.is_regular_file() &&
        e.path().filename().string().rfind(".tmp-", 0) != 0)
      preds.push_back(e.path().string());
  std::sort(preds.begin(), preds.end());
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> orphans;
  for (const auto& p : preds) {
    const std::string stem = stem_of(p);
    std::string match;
    for (const auto& e : fs::directory_iterator(other))
      if (e.is_regular_file() && stem_of(e.path().string()) == stem) {
        match = e.path().string();
        break;
      }
    if (match.empty()) {
      orphans.push_back(stem);
    } else {
      pairs.emplace_back(p, match);
    }
  }
  if (!orphans.empty()) {
    std::string list;
    for (const auto& o : orphans) list += (list.empty() ? "" : ", ") + o;
    throw iid::InvalidInput("eval: no " + other_kind + " match for: " + list);
  }
  if (pairs.empty())
    throw iid::InvalidInput("eval: no prediction files found in '" + pred +
                            "'");
  return pairs;
}

int run_eval(const std::string& metric, const std::string& pred,
             const std::string& gt, const std::string& judgments,
             const CommonOpts& common, double delta, double window_frac,
             bool per_channel, const std::string& luma) {
  Timing timing;
  ensure_out_dir(common.out_dir);
  const iid::SiMode si_mode =
      per_channel ? iid::SiMode::per_channel : iid::SiMode::luminance;
  const iid::LumaMode luma_mode =
      luma == "rec709" ? iid::LumaMode::rec709 : iid::LumaMode::mean;

  std::vector<std::pair<std::string, std::string>> pairs;
  if (metric == "whdr") {
    if (judgments.empty())
      throw iid::InvalidParameter("eval --metric whdr needs --judgments");
    pairs = pair_inputs(pred, judgments, "judgments");
  } else {
    if (gt.empty())
      throw iid::InvalidParameter("eval --metric " + metric + " needs --gt");
    pairs = pair_inputs(pred, gt, "ground-truth");
  }

  json rows = json::array();
  double sum = 0.0;
  std::vector<double> values(pairs.size());
  run_parallel(pairs.size(), common.jobs, [&](std::size_t i) {
    const auto& [p, other] = pairs[i];
    const iid::Image pred_img = iid::load_image(p, common.srgb);
    double value;
    if (metric == "whdr") {
      value = iid::whdr(pred_img, iid::load_judgments(other), delta,
                        luma_mode);
    } else {
      const iid::Image gt_img = iid::load_image(other, common.srgb);
      value = metric == "simse"
                  ? iid::si_mse(pred_img, gt_img, si_mode)
                  : iid::si_lmse(pred_img, gt_img, window_frac, si_mode);
    }
    values[i] = value;
  });
  json in_records = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    in_records.push_back(input_record(pairs[i].first));
    in_records.push_back(input_record(pairs[i].second));
    rows.push_back(json{{"image", stem_of(pairs[i].first)},
                        {"metric", metric},
                        {"value", values[i]}});
    sum += values[i];
    std::cout << stem_of(pairs[i].first) << " " << metric << " "
              << values[i] << "\n";
  }
  const double aggregate = sum / static_cast<double>(pairs.size());
  std::cout << "aggregate " << metric << " " << aggregate << "\n";

  json results{{"rows", rows}, {"aggregate", aggregate}};
  const std::string results_path = common.out_dir + "/results.json";
  atomic_write_text(results_path, results.dump(2) + "\n");

  json config = common_config(common);
  config["metric"] = metric;
  config["delta"] = delta;
  config["window_frac"] = window_frac;
  config["per_channel"] = per_channel;
  config["luma"] = luma;
  write_manifest(common.out_dir, "eval", config, in_records,
                 json::array({results_path}), results, timing);
  return 0;
}

// --- synth ----------------------------------------------------------------

int run_synth_shadow(const CommonOpts& common, iid::ShadowSceneParams params,
                     int count) {
  Timing timing;
  ensure_out_dir(common.out_dir);
  json outputs = json::array();
  json results = json::array();
  std::vector<json> per_scene(count);
  std::vector<std::vector<std::string>> per_files(count);
  run_parallel(count, common.jobs, [&](std::size_t i) {
    iid::ShadowSceneParams p = params;
    p.seed = params.seed + i;
    const std::string dir =
        count == 1 ? common.out_dir
                   : common.out_dir + "/scene_" + std::to_string(p.seed);
    ensure_out_dir(dir);
    const iid::ShadowScene scene = iid::gen_shadow_scene(p);
    for (const auto& name : iid::write_shadow_bundle(scene, dir))
      per_files[i].push_back(dir + "/" + name);
    per_scene[i] = json{{"seed", p.seed},
                        {"dir", dir},
                        {"oracle_theta_deg", scene.oracle_theta_deg}};
  });
  for (const auto& files : per_files)
    for (const auto& f : files) outputs.push_back(f);
  for (auto& r : per_scene) results.push_back(std::move(r));

  json config = common_config(common, /*with_images=*/false);
  config["kind"] = "shadow";
  config["seed"] = params.seed;
  config["count"] = count;
  config["height"] = params.height;
  config["width"] = params.width;
  config["patches"] = params.n_patches;
  config["lit_temp"] = params.lit_temp;
  config["shadow_temp"] = params.shadow_temp;
  config["attenuation"] = params.attenuation;
  config["softness"] = params.softness;
  write_manifest(common.out_dir, "synth", config, json::array(), outputs,
                 results, timing);
  return 0;
}

int run_synth_specular(const CommonOpts& common,
                       iid::SpecularSceneParams params, int count) {
  Timing timing;
  ensure_out_dir(common.out_dir);
  json outputs = json::array();
  json results = json::array();
  std::vector<json> per_scene(count);
  std::vector<std::vector<std::string>> per_files(count);
  run_parallel(count, common.jobs, [&](std::size_t i) {
    iid::SpecularSceneParams p = params;
    p.seed = params.seed + i;
    const std::string dir =
        count == 1 ? common.out_dir
                   : common.out_dir + "/scene_" + std::to_string(p.seed);
    ensure_out_dir(dir);
    const iid::SpecularScene scene = iid::gen_specular_scene(p);
    for (const auto& name : iid::write_specular_bundle(scene, dir))
      per_files[i].push_back(dir + "/" + name);
    per_scene[i] =
        json{{"seed", p.seed}, {"dir", dir}, {"clipped", scene.clipped}};
  });
  for (const auto& files : per_files)
    for (const auto& f : files) outputs.push_back(f);
  for (auto& r : per_scene) results.push_back(std::move(r));

  json config = common_config(common, /*with_images=*/false);
  config["kind"] = "specular";
  config["seed"] = params.seed;
  config["count"] = count;
  config["height"] = params.height;
  config["width"] = params.width;
  config["patches"] = params.n_patches;
  config["lobes"] = params.n_lobes;
  config["lobe_strength"] = params.lobe_strength;
  config["lobe_sigma"] = params.lobe_sigma;
  write_manifest(common.out_dir, "synth", config, json::array(), outputs,
                 results, timing);
  return 0;
}

// --- attention ------------------------------------------------------------

int run_attention(const std::string& features, const std::string& weights,
                  const CommonOpts& common, const std::string& norm,
                  double nu) {
  Timing timing;
  ensure_out_dir(common.out_dir);
  iid::FeatureStack stack = iid::load_feature_stack(features);
  const iid::ClassifierWeights cw = iid::load_classifier_weights(weights);

  if (norm == "in") {
    stack = iid::instance_norm(stack);
  } else if (norm == "ln") {
    stack = iid::layer_norm(stack);
  } else if (norm == "lin") {
    const std::vector<double> gamma(stack.count, 1.0);
    const std::vector<double> beta(stack.count, 0.0);
    stack = iid::lin_norm(stack, gamma, beta, nu);
  } else if (norm != "none") {
    throw iid::InvalidParameter("norm must be none, in, ln, or lin");
  }

  const iid::PixelField raw = iid::cam_attention(stack, cw);
  const std::string heat_path = common.out_dir + "/attention.png";
  save_png16(iid::render_heatmap(raw), heat_path, /*srgb=*/false,
             common.bit_depth);
  // Raw map riding in a 1-map stack keeps the contractual values exact.
  iid::FeatureStack raw_stack(1, raw.height, raw.width);
  raw_stack.v = raw.v;
  const std::string raw_path = common.out_dir + "/attention_raw.fstk";
  atomic_write(raw_path, [&](const std::string& tmp) {
    iid::save_feature_stack(raw_stack, tmp);
  });

  const auto [mn, mx] = std::minmax_element(raw.v.begin(), raw.v.end());
  json config = common_config(common, /*with_images=*/false);
  config["norm"] = norm;
  config["nu"] = nu;
  config["bit_depth"] = common.bit_depth;
  write_manifest(
      common.out_dir, "attention", config,
      json::array({input_record(features), input_record(weights)}),
      json::array({heat_path, raw_path}),
      json{{"min", *mn}, {"max", *mx}, {"maps", stack.count}}, timing);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prior-driven intrinsic image tools"};
  app.set_version_flag("--version", iid::kVersion);
  app.set_config("--config", "", "Key=value config file (flags win)");
  app.require_subcommand(1);

  // shadowfree
  auto* sf = app.add_subcommand(
      "shadowfree", "Entropy-swept illumination-invariant images");
  std::vector<std::string> sf_inputs;
  CommonOpts sf_common;
  double sf_theta = -1.0;
  sf->add_option("inputs", sf_inputs, "Input images")->required();
  add_common(sf, &sf_common);
  auto* sf_theta_opt = sf->add_option(
      "--theta", sf_theta, "Invariant angle override in degrees [0, 180)");

  // specularfree
  auto* hf = app.add_subcommand("specularfree",
                                "Max-chromaticity specular suppression");
  std::vector<std::string> hf_inputs;
  CommonOpts hf_common;
  double hf_lambda = iid::kDefaultMaxChroma;
  hf->add_option("inputs", hf_inputs, "Input images")->required();
  add_common(hf, &hf_common);
  hf->add_option("--lambda", hf_lambda,
                 "Target maximum chromaticity in (1/3, 1]");

  // decompose
  auto* dc = app.add_subcommand(
      "decompose", "Reflectance/shading decomposition by descent");
  std::vector<std::string> dc_inputs;
  CommonOpts dc_common;
  DecomposeOpts dc_opts;
  double dc_theta = -1.0;
  dc->add_option("inputs", dc_inputs, "Input images")->required();
  add_common(dc, &dc_common);
  dc->add_option("--max-iters", dc_opts.solver.max_iters, "Iteration budget")
      ->check(CLI::NonNegativeNumber);
  dc->add_option("--step", dc_opts.solver.step_size, "Initial step size");
  dc->add_option("--step-decay", dc_opts.solver.step_decay,
                 "Step multiplier on plateau");
  dc->add_option("--plateau-iters", dc_opts.solver.plateau_iters,
                 "Plateau window (accepted steps)");
  dc->add_option("--converge-rel", dc_opts.solver.converge_rel,
                 "Relative decrease treated as converged");
  dc->add_option("--converge-window", dc_opts.solver.converge_window,
                 "Convergence window (accepted steps)");
  dc->add_option("--lambda", dc_opts.solver.lambda,
                 "Specular-free prior target chromaticity");
  auto* dc_theta_opt =
      dc->add_option("--theta", dc_theta, "Invariant angle override");
  dc->add_option("--init", dc_opts.init,
                 "Initialization: from_input or from_priors")
      ->check(CLI::IsMember({"from_input", "from_priors"}));
  dc->add_option("--weight-sf", dc_opts.weights.sf, "Shadow prior weight");
  dc->add_option("--weight-hf", dc_opts.weights.hf, "Specular prior weight");
  dc->add_option("--weight-grad", dc_opts.weights.grad,
                 "Gradient separation weight");
  dc->add_option("--weight-smooth", dc_opts.weights.smooth,
                 "Shading smoothness weight");
  dc->add_option("--weight-sparse", dc_opts.weights.sparse,
                 "Reflectance sparsity weight");
  dc->add_option("--weight-rec", dc_opts.weights.rec,
                 "Reconstruction weight");

  // eval
  auto* ev = app.add_subcommand("eval", "Intrinsic decomposition metrics");
  CommonOpts ev_common;
  std::string ev_metric, ev_pred, ev_gt, ev_judgments, ev_luma = "mean";
  double ev_delta = 0.10, ev_window = 0.1;
  bool ev_per_channel = false;
  ev->add_option("--metric", ev_metric, "whdr, simse, or silmse")
      ->required()
      ->check(CLI::IsMember({"whdr", "simse", "silmse"}));
  ev->add_option("--pred", ev_pred, "Prediction image or directory")
      ->required();
  ev->add_option("--gt", ev_gt, "Ground-truth image or directory");
  ev->add_option("--judgments", ev_judgments,
                 "Judgment JSON file or directory (whdr)");
  ev->add_option("--delta", ev_delta, "WHDR equality threshold");
  ev->add_option("--window-frac", ev_window, "si-LMSE window fraction");
  ev->add_flag("--per-channel", ev_per_channel,
               "Fit scales per channel instead of on luminance");
  ev->add_option("--luma", ev_luma, "Luminance for WHDR: mean or rec709")
      ->check(CLI::IsMember({"mean", "rec709"}));
  add_common(ev, &ev_common);

  // synth
  auto* sy = app.add_subcommand("synth", "Deterministic synthetic scenes");
  sy->require_subcommand(1);
  auto* sy_sh = sy->add_subcommand("shadow", "Two-light shadowed Mondrian");
  CommonOpts sy_sh_common;
  iid::ShadowSceneParams sh_params;
  int sh_count = 1;
  std::uint64_t sh_seed = 1;
  sy_sh->add_option("--seed", sh_seed, "Base seed");
  sy_sh->add_option("--count", sh_count, "Number of scenes (seeds seed..)")
      ->check(CLI::Range(1, 10000));
  sy_sh->add_option("--height", sh_params.height, "Scene height");
  sy_sh->add_option("--width", sh_params.width, "Scene width");
  sy_sh->add_option("--patches", sh_params.n_patches, "Patch count");
  sy_sh->add_option("--lit-temp", sh_params.lit_temp,
                    "Lit illuminant temperature (K)");
  sy_sh->add_option("--shadow-temp", sh_params.shadow_temp,
                    "Shadow illuminant temperature (K)");
  sy_sh->add_option("--attenuation", sh_params.attenuation,
                    "Shadow attenuation in (0, 1)");
  sy_sh->add_option("--softness", sh_params.softness,
                    "Shadow edge sigma, pixels");
  add_common(sy_sh, &sy_sh_common, /*with_images=*/false);

  auto* sy_sp = sy->add_subcommand("specular", "Highlighted Mondrian");
  CommonOpts sy_sp_common;
  iid::SpecularSceneParams sp_params;
  int sp_count = 1;
  std::uint64_t sp_seed = 1;
  sy_sp->add_option("--seed", sp_seed, "Base seed");
  sy_sp->add_option("--count", sp_count, "Number of scenes")
      ->check(CLI::Range(1, 10000));
  sy_sp->add_option("--height", sp_params.height, "Scene height");
  sy_sp->add_option("--width", sp_params.width, "Scene width");
  sy_sp->add_option("--patches", sp_params.n_patches, "Patch count");
  sy_sp->add_option("--lobes", sp_params.n_lobes, "Highlight count");
  sy_sp->add_option("--lobe-strength", sp_params.lobe_strength,
                    "Highlight amplitude scale");
  sy_sp->add_option("--lobe-sigma", sp_params.lobe_sigma,
                    "Highlight radius, pixels");
  add_common(sy_sp, &sy_sp_common, /*with_images=*/false);

  // attention
  auto* at = app.add_subcommand("attention",
                                "Classifier-weighted attention heatmaps");
  CommonOpts at_common;
  std::string at_features, at_weights, at_norm = "none";
  double at_nu = 0.5;
  at->add_option("--features", at_features, "Feature stack (.fstk)")
      ->required();
  at->add_option("--weights", at_weights, "Classifier weights JSON")
      ->required();
  at->add_option("--norm", at_norm,
                 "Pre-normalization: none, in, ln, or lin")
      ->check(CLI::IsMember({"none", "in", "ln", "lin"}));
  at->add_option("--nu", at_nu, "Instance/layer blend for --norm lin");
  add_common(at, &at_common, /*with_images=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // Usage problems map to the validation exit code; help/version to 0.
    return code == 0 ? 0 : 2;
  }

  try {
    if (sf->parsed())
      return run_shadowfree(
          sf_inputs, sf_common,
          sf_theta_opt->count() ? std::optional<double>(sf_theta)
                                : std::nullopt);
    if (hf->parsed()) return run_specularfree(hf_inputs, hf_common, hf_lambda);
    if (dc->parsed()) {
      if (dc_theta_opt->count()) dc_opts.solver.theta_deg = dc_theta;
      return run_decompose(dc_inputs, dc_common, dc_opts);
    }
    if (ev->parsed())
      return run_eval(ev_metric, ev_pred, ev_gt, ev_judgments, ev_common,
                      ev_delta, ev_window, ev_per_channel, ev_luma);
    if (sy->parsed()) {
      if (sy_sh->parsed()) {
        sh_params.seed = sh_seed;
        return run_synth_shadow(sy_sh_common, sh_params, sh_count);
      }
      sp_params.seed = sp_seed;
      return run_synth_specular(sy_sp_common, sp_params, sp_count);
    }
    if (at->parsed())
      return run_attention(at_features, at_weights, at_common, at_norm,
                           at_nu);
  } catch (const iid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
