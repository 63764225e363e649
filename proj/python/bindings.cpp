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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>

#include "iid/aware.hpp"
#include "iid/error.hpp"
#include "iid/imageio.hpp"
#include "iid/losses.hpp"
#include "iid/metrics.hpp"
#include "iid/shadowfree.hpp"
#include "iid/solver.hpp"
#include "iid/specularfree.hpp"
#include "iid/synth.hpp"

namespace py = pybind11;

namespace {

using Arr = py::array_t<double, py::array::c_style | py::array::forcecast>;

iid::Image to_image(const Arr& a) {
  if (a.ndim() == 2) {
    const int h = static_cast<int>(a.shape(0));
    const int w = static_cast<int>(a.shape(1));
    return iid::Image::from_data(
        h, w, 1, std::vector<double>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() == 3) {
    const int h = static_cast<int>(a.shape(0));
    const int w = static_cast<int>(a.shape(1));
    const int c = static_cast<int>(a.shape(2));
    return iid::Image::from_data(
        h, w, c, std::vector<double>(a.data(), a.data() + a.size()));
  }
  throw iid::InvalidInput("expected a (H, W) or (H, W, C) array");
}

py::array from_image(const iid::Image& im) {
  if (im.channels() == 1) {
    py::array_t<double> out({im.height(), im.width()});
    std::copy(im.data(), im.data() + im.size(), out.mutable_data());
    return out;
  }
  py::array_t<double> out({im.height(), im.width(), im.channels()});
  std::copy(im.data(), im.data() + im.size(), out.mutable_data());
  return out;
}

py::array from_field(const iid::PixelField& f) {
  if (f.channels == 1) {
    py::array_t<double> out({f.height, f.width});
    std::copy(f.v.begin(), f.v.end(), out.mutable_data());
    return out;
  }
  py::array_t<double> out({f.height, f.width, f.channels});
  std::copy(f.v.begin(), f.v.end(), out.mutable_data());
  return out;
}

iid::FeatureStack to_stack(const Arr& a) {
  if (a.ndim() != 3)
    throw iid::InvalidInput("expected a (M, H, W) feature array");
  iid::FeatureStack f(static_cast<int>(a.shape(0)),
                      static_cast<int>(a.shape(1)),
                      static_cast<int>(a.shape(2)));
  std::copy(a.data(), a.data() + a.size(), f.v.begin());
  return f;
}

py::array from_stack(const iid::FeatureStack& f) {
  py::array_t<double> out({f.count, f.height, f.width});
  std::copy(f.v.begin(), f.v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "prior-driven intrinsic decomposition core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<iid::Error>(m, "IidError", PyExc_RuntimeError);

  // -- basic image ops ------------------------------------------------------
  m.def(
      "chromaticity",
      [](const Arr& a) { return from_image(iid::chromaticity(to_image(a))); },
      py::arg("image"));
  m.def(
      "luminance",
      [](const Arr& a) { return from_image(iid::luminance(to_image(a))); },
      py::arg("image"));
  m.def(
      "downsample",
      [](const Arr& a, int level) {
        return from_image(iid::downsample(to_image(a), level));
      },
      py::arg("image"), py::arg("level"));
  m.def(
      "gradient",
      [](const Arr& a) {
        const iid::GradientField g = iid::gradient(to_image(a));
        return py::make_tuple(from_field(g.dx), from_field(g.dy));
      },
      py::arg("image"), "Forward differences; returns (dx, dy).");
  m.def("srgb_to_linear", py::vectorize(iid::srgb_to_linear), py::arg("v"));
  m.def("linear_to_srgb", py::vectorize(iid::linear_to_srgb), py::arg("v"));
  m.def(
      "load_image",
      [](const std::string& path, bool assume_srgb) {
        return from_image(iid::load_image(path, assume_srgb));
      },
      py::arg("path"), py::arg("assume_srgb") = false);
  m.def(
      "save_image",
      [](const Arr& a, const std::string& path, bool assume_srgb,
         int bit_depth) {
        iid::save_image(to_image(a), path, assume_srgb, bit_depth);
      },
      py::arg("image"), py::arg("path"), py::arg("assume_srgb") = false,
      py::arg("bit_depth") = 16);

  // -- specular-free transform ----------------------------------------------
  m.def(
      "specular_free",
      [](const Arr& a, double lam) {
        return from_image(iid::specular_free(to_image(a), lam));
      },
      py::arg("image"), py::arg("lam") = iid::kDefaultMaxChroma);
  m.def(
      "specular_free_gray",
      [](const Arr& a, double lam) {
        return from_image(iid::specular_free_gray(to_image(a), lam));
      },
      py::arg("image"), py::arg("lam") = iid::kDefaultMaxChroma);
  m.def(
      "specular_free_full",
      [](const Arr& a, double lam) {
        const iid::SpecularFreeResult r =
            iid::specular_free_full(to_image(a), lam);
        py::dict d;
        d["image"] = from_image(r.image);
        d["clamp_fraction"] = r.clamp_fraction;
        return d;
      },
      py::arg("image"), py::arg("lam") = iid::kDefaultMaxChroma);

  // -- shadow-free transform ------------------------------------------------
  m.def(
      "entropy_profile",
      [](const Arr& a) {
        const iid::EntropyProfile p =
            iid::entropy_profile(iid::log_chromaticity(to_image(a)));
        py::array_t<double> out({py::ssize_t{180}});
        std::copy(p.entropy_bits.begin(), p.entropy_bits.end(),
                  out.mutable_data());
        return out;
      },
      py::arg("image"), "Projection entropy in bits for angles 0..179.");
  m.def(
      "min_entropy_angle",
      [](const Arr& a) {
        return iid::min_entropy_angle(
            iid::entropy_profile(iid::log_chromaticity(to_image(a))));
      },
      py::arg("image"));
  m.def(
      "invariant_grayscale",
      [](const Arr& a, std::optional<double> theta) {
        const iid::Image img = to_image(a);
        const iid::LogChromaticity lc = iid::log_chromaticity(img);
        const double t = theta ? *theta
                               : iid::min_entropy_angle(
                                     iid::entropy_profile(lc));
        return from_image(iid::invariant_grayscale(lc, t));
      },
      py::arg("image"), py::arg("theta") = py::none());
  m.def(
      "colored_shadowfree",
      [](const Arr& a, std::optional<double> theta) {
        const iid::Image img = to_image(a);
        const double t =
            theta ? *theta
                  : iid::min_entropy_angle(
                        iid::entropy_profile(iid::log_chromaticity(img)));
        return from_image(iid::colored_shadowfree(img, t));
      },
      py::arg("image"), py::arg("theta") = py::none());

  // -- losses ---------------------------------------------------------------
  m.def("loss_classification", &iid::loss_classification,
        py::arg("prob_input"), py::arg("prob_free"));
  m.def("loss_adversarial", &iid::loss_adversarial, py::arg("d_real"),
        py::arg("d_fake"));
  m.def(
      "total_stage1",
      [](const Arr& r, const Arr& s, const Arr& image,
         std::optional<double> theta, double lam) {
        const iid::Image I = to_image(image);
        const iid::PreparedPriors pp = iid::prepare_priors(I, theta, lam);
        const iid::Image R = to_image(r), S = to_image(s);
        const iid::Stage1Result res =
            iid::total_stage1(R, S, pp.priors, I);
        py::dict d;
        d["total"] = res.terms.total;
        d["sf"] = res.terms.sf;
        d["hf"] = res.terms.hf;
        d["grad"] = res.terms.grad;
        d["smooth"] = res.terms.smooth;
        d["sparse"] = res.terms.sparse;
        d["rec"] = res.terms.rec;
        d["grad_r"] = from_field(res.grad_r);
        d["grad_s"] = from_field(res.grad_s);
        d["theta_deg"] = pp.theta_deg;
        return d;
      },
      py::arg("reflectance"), py::arg("shading"), py::arg("image"),
      py::arg("theta") = py::none(),
      py::arg("lam") = iid::kDefaultMaxChroma);

  // -- solver ---------------------------------------------------------------
  m.def(
      "decompose",
      [](const Arr& a, int max_iters, double step_size,
         std::optional<double> theta, double lam, const std::string& init) {
        iid::SolverConfig cfg;
        cfg.max_iters = max_iters;
        cfg.step_size = step_size;
        cfg.theta_deg = theta;
        cfg.lambda = lam;
        if (init == "from_input")
          cfg.init = iid::SolverConfig::Init::from_input;
        else if (init == "from_priors")
          cfg.init = iid::SolverConfig::Init::from_priors;
        else
          throw iid::InvalidParameter("init must be from_input or from_priors");
        const iid::DecompositionResult r =
            iid::decompose(to_image(a), {}, cfg);
        py::dict d;
        d["reflectance"] = from_image(r.reflectance);
        d["shading"] = from_image(r.shading);
        d["trace"] = py::array_t<double>(py::ssize_t(r.trace.size()),
                                         r.trace.data());
        d["reconstruction_residual"] = r.reconstruction_residual;
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        d["theta_deg"] = r.theta_deg;
        return d;
      },
      py::arg("image"), py::arg("max_iters") = 2000,
      py::arg("step_size") = 0.05, py::arg("theta") = py::none(),
      py::arg("lam") = iid::kDefaultMaxChroma,
      py::arg("init") = "from_input");

  // -- metrics --------------------------------------------------------------
  m.def(
      "si_mse",
      [](const Arr& pred, const Arr& gt, bool per_channel) {
        return iid::si_mse(
            to_image(pred), to_image(gt),
            per_channel ? iid::SiMode::per_channel : iid::SiMode::luminance);
      },
      py::arg("pred"), py::arg("gt"), py::arg("per_channel") = false);
  m.def(
      "si_lmse",
      [](const Arr& pred, const Arr& gt, double window_frac,
         bool per_channel) {
        return iid::si_lmse(
            to_image(pred), to_image(gt), window_frac,
            per_channel ? iid::SiMode::per_channel : iid::SiMode::luminance);
      },
      py::arg("pred"), py::arg("gt"), py::arg("window_frac") = 0.1,
      py::arg("per_channel") = false);
  m.def(
      "whdr",
      [](const Arr& reflectance, const py::list& judgments, double delta,
         bool rec709) {
        iid::JudgmentSet js;
        for (const auto& item : judgments) {
          const py::dict d = item.cast<py::dict>();
          iid::Judgment j;
          const py::sequence p1 = d["p1"].cast<py::sequence>();
          const py::sequence p2 = d["p2"].cast<py::sequence>();
          j.y1 = p1[0].cast<double>();
          j.x1 = p1[1].cast<double>();
          j.y2 = p2[0].cast<double>();
          j.x2 = p2[1].cast<double>();
          j.darker = d["darker"].cast<std::string>().at(0);
          if (d.contains("weight")) j.weight = d["weight"].cast<double>();
          js.judgments.push_back(j);
        }
        return iid::whdr(to_image(reflectance), js, delta,
                         rec709 ? iid::LumaMode::rec709
                                : iid::LumaMode::mean);
      },
      py::arg("reflectance"), py::arg("judgments"), py::arg("delta") = 0.1,
      py::arg("rec709") = false);
  m.def(
      "load_judgments",
      [](const std::string& path) {
        py::list out;
        for (const iid::Judgment& j : iid::load_judgments(path).judgments) {
          py::dict d;
          d["p1"] = py::make_tuple(j.y1, j.x1);
          d["p2"] = py::make_tuple(j.y2, j.x2);
          d["darker"] = std::string(1, j.darker);
          d["weight"] = j.weight;
          out.append(d);
        }
        return out;
      },
      py::arg("path"));

  // -- attention and normalization ------------------------------------------
  m.def(
      "cam_attention",
      [](const Arr& features, const std::vector<double>& weights) {
        return from_field(
            iid::cam_attention(to_stack(features), {weights}));
      },
      py::arg("features"), py::arg("weights"));
  m.def(
      "instance_norm",
      [](const Arr& f) { return from_stack(iid::instance_norm(to_stack(f))); },
      py::arg("features"));
  m.def(
      "layer_norm",
      [](const Arr& f) { return from_stack(iid::layer_norm(to_stack(f))); },
      py::arg("features"));
  m.def(
      "lin_norm",
      [](const Arr& f, const std::vector<double>& gamma,
         const std::vector<double>& beta, double nu) {
        return from_stack(iid::lin_norm(to_stack(f), gamma, beta, nu));
      },
      py::arg("features"), py::arg("gamma"), py::arg("beta"), py::arg("nu"));

  // -- synthetic scenes -----------------------------------------------------
  m.def(
      "gen_shadow_scene",
      [](std::uint64_t seed, int height, int width, int n_patches,
         double attenuation, double softness) {
        iid::ShadowSceneParams p;
        p.seed = seed;
        p.height = height;
        p.width = width;
        p.n_patches = n_patches;
        p.attenuation = attenuation;
        p.softness = softness;
        const iid::ShadowScene s = iid::gen_shadow_scene(p);
        py::dict d;
        d["image"] = from_image(s.image);
        d["reflectance_gt"] = from_image(s.reflectance_gt);
        d["shading_gt"] = from_image(s.shading_gt);
        d["shadow_mask"] = from_image(s.shadow_mask);
        d["patch_ids"] = py::array_t<int>(
            {s.image.height(), s.image.width()}, s.patch_ids.data());
        d["oracle_theta_deg"] = s.oracle_theta_deg;
        return d;
      },
      py::arg("seed") = 1, py::arg("height") = 128, py::arg("width") = 128,
      py::arg("n_patches") = 10, py::arg("attenuation") = 0.45,
      py::arg("softness") = 10.0);
  m.def(
      "gen_specular_scene",
      [](std::uint64_t seed, int height, int width, int n_lobes,
         double lobe_strength) {
        iid::SpecularSceneParams p;
        p.seed = seed;
        p.height = height;
        p.width = width;
        p.n_lobes = n_lobes;
        p.lobe_strength = lobe_strength;
        const iid::SpecularScene s = iid::gen_specular_scene(p);
        py::dict d;
        d["image"] = from_image(s.image);
        d["diffuse"] = from_image(s.diffuse);
        d["specular"] = from_image(s.specular);
        d["reflectance_gt"] = from_image(s.reflectance_gt);
        d["shading_gt"] = from_image(s.shading_gt);
        d["clipped"] = s.clipped;
        return d;
      },
      py::arg("seed") = 1, py::arg("height") = 128, py::arg("width") = 128,
      py::arg("n_lobes") = 3, py::arg("lobe_strength") = 0.25);
}
