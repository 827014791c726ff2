// Copyright 2026 The fdrpred Authors
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
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <string>
#include <vector>

#include "fdr/dataset.hpp"
#include "fdr/error.hpp"
#include "fdr/eval.hpp"
#include "fdr/hpo.hpp"
#include "fdr/models.hpp"
#include "fdr/nn/optim.hpp"
#include "fdr/trace.hpp"

namespace py = pybind11;
using namespace fdr;

namespace {

using TracePtr = std::shared_ptr<OutcomeTrace>;
using Bits = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

std::vector<std::uint8_t> to_bits(const Bits& a) {
  auto r = a.unchecked<1>();
  std::vector<std::uint8_t> v(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) v[static_cast<std::size_t>(i)] = r(i);
  return v;
}

template <typename T>
py::array_t<T> to_array(std::span<const T> v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

Split split_from(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split '" + s + "'");
}

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["count"] = r.count;
  d["mu_e2"] = r.mu_e2;
  d["e2_p90"] = r.e2_p90;
  d["e2_p95"] = r.e2_p95;
  d["e2_p99"] = r.e2_p99;
  d["e2_max"] = r.e2_max;
  d["mu_abs_e"] = r.mu_abs;
  d["sigma_abs_e"] = r.sigma_abs;
  d["abs_e_p90"] = r.abs_p90;
  d["abs_e_p95"] = r.abs_p95;
  d["abs_e_p99"] = r.abs_p99;
  d["abs_e_max"] = r.abs_max;
  d["e_min"] = r.e_min;
  d["e_p5"] = r.e_p5;
  d["e_p95"] = r.e_p95;
  d["e_max"] = r.e_max;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fdrpred, m) {
  m.doc() = "Frame delivery ratio prediction core";
  m.attr("__version__") = FDR_VERSION;

  auto& base_error = py::register_exception<Error>(m, "FdrError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base_error.ptr());
  py::register_exception<ParseError>(m, "ParseError", base_error.ptr());
  py::register_exception<FormatError>(m, "FormatError", base_error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base_error.ptr());
  py::register_exception<RangeError>(m, "RangeError", base_error.ptr());

  // --- traces ---
  py::class_<OutcomeTrace, TracePtr>(m, "Trace")
      .def(py::init([](const Bits& bits, std::uint32_t channel, double period_s) {
             return std::make_shared<OutcomeTrace>(to_bits(bits), channel, period_s);
           }),
           py::arg("outcomes"), py::arg("channel") = 0, py::arg("period_s") = 0.5)
      .def_property_readonly("outcomes", [](const OutcomeTrace& t) { return to_array(t.outcomes()); })
      .def_property_readonly("channel", &OutcomeTrace::channel_id)
      .def_property_readonly("period_s", &OutcomeTrace::period_s)
      .def("success_ratio", &OutcomeTrace::success_ratio)
      .def("__len__", &OutcomeTrace::size)
      .def("__eq__", [](const OutcomeTrace& a, const OutcomeTrace& b) { return a == b; })
      .def("__repr__", [](const OutcomeTrace& t) {
        return "Trace(n=" + std::to_string(t.size()) + ", channel=" + std::to_string(t.channel_id()) + ")";
      });

  m.def("preset_names", &channel_preset_names);
  m.def(
      "simulate",
      [](std::size_t n, const std::string& preset, std::optional<std::uint64_t> seed, std::optional<double> p_gb,
         std::optional<double> p_bg, std::optional<double> e_g, std::optional<double> e_b, double drift_amplitude,
         double drift_period, std::optional<std::uint32_t> channel) {
        GEChannelSpec s = preset.empty() ? calibrated_channel_spec() : channel_preset(preset);
        if (seed) s.seed = *seed;
        if (p_gb) s.p_gb = *p_gb;
        if (p_bg) s.p_bg = *p_bg;
        if (e_g) s.e_g = *e_g;
        if (e_b) s.e_b = *e_b;
        if (drift_amplitude > 0) s.drift = LossDrift{drift_amplitude, drift_period};
        if (channel) s.channel_id = *channel;
        SimulationResult r = simulate_channel(s, n);
        std::vector<std::uint8_t> states(r.states.size());
        for (std::size_t i = 0; i < states.size(); ++i) states[i] = static_cast<std::uint8_t>(r.states[i]);
        return py::make_tuple(std::make_shared<OutcomeTrace>(std::move(r.trace)),
                              to_array(std::span<const std::uint8_t>(states)));
      },
      py::arg("n"), py::arg("preset") = "", py::arg("seed") = py::none(), py::arg("p_gb") = py::none(),
      py::arg("p_bg") = py::none(), py::arg("e_g") = py::none(), py::arg("e_b") = py::none(),
      py::arg("drift_amplitude") = 0.0, py::arg("drift_period") = 0.0, py::arg("channel") = py::none(),
      "Simulate a Gilbert-Elliott channel; returns (trace, states) with state 0 = good, 1 = bad.");
  m.def(
      "stationary_fdr",
      [](double p_gb, double p_bg, double e_g, double e_b) {
        GEChannelSpec s;
        s.p_gb = p_gb;
        s.p_bg = p_bg;
        s.e_g = e_g;
        s.e_b = e_b;
        return stationary_fdr(s);
      },
      py::arg("p_gb"), py::arg("p_bg"), py::arg("e_g"), py::arg("e_b"));
  m.def(
      "trace_stats",
      [](const OutcomeTrace& t, std::size_t window) {
        TraceStats s = trace_stats(t, window);
        py::dict d;
        d["mean_fdr"] = s.mean_fdr;
        d["std_fdr"] = s.std_fdr;
        d["window_count"] = s.window_count;
        d["zero_runs"] = s.zero_runs;
        d["one_runs"] = s.one_runs;
        d["max_zero_run"] = s.max_zero_run;
        d["max_one_run"] = s.max_one_run;
        return d;
      },
      py::arg("trace"), py::arg("window") = 3600);

  m.def("encode_packed", [](const OutcomeTrace& t) {
    auto b = encode_packed(t);
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
  });
  m.def("decode_packed", [](const py::bytes& b) {
    std::string s = b;
    return std::make_shared<OutcomeTrace>(
        decode_packed(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
  });
  m.def("format_trace_text", &format_trace_text);
  m.def("parse_trace_text", [](const std::string& s) { return std::make_shared<OutcomeTrace>(parse_trace_text(s)); });
  m.def("load_trace", [](const std::filesystem::path& p) { return std::make_shared<OutcomeTrace>(load_trace(p)); });
  m.def("save_trace_packed", &save_trace_packed);
  m.def("save_trace_text", &save_trace_text);
  m.def("trace_hash", &trace_hash);

  // --- datasets ---
  m.def("fdr_target", &fdr_target, py::arg("trace"), py::arg("i"), py::arg("horizon"));

  py::class_<WindowedDataset>(m, "Dataset")
      .def(py::init([](const std::vector<TracePtr>& traces, std::size_t window, std::size_t horizon,
                       std::size_t stride, std::tuple<double, double, double> fr) {
             if (traces.empty()) throw ValidationError("at least one trace is required");
             SplitFractions f{std::get<0>(fr), std::get<1>(fr), std::get<2>(fr)};
             std::vector<WindowedDataset> parts;
             for (const auto& t : traces) parts.push_back(split_chronological(make_windows(t, window, horizon, stride), f));
             return concat_datasets(parts);
           }),
           py::arg("traces"), py::arg("window"), py::arg("horizon"), py::arg("stride") = 1,
           py::arg("fractions") = std::make_tuple(0.6, 0.2, 0.2))
      .def("__len__", &WindowedDataset::size)
      .def_property_readonly("window_length", &WindowedDataset::window_length)
      .def_property_readonly("horizon", &WindowedDataset::horizon)
      .def_property_readonly("gap", &WindowedDataset::gap)
      .def("count", [](const WindowedDataset& d, const std::string& s) { return d.count(split_from(s)); })
      .def("targets",
           [](const WindowedDataset& d, const std::string& s) {
             auto t = targets_of(d, split_from(s));
             return to_array(std::span<const double>(t));
           })
      .def("indices",
           [](const WindowedDataset& d, const std::string& s) {
             std::vector<std::size_t> out;
             for (std::size_t k : d.indices(split_from(s))) out.push_back(d[k].index);
             return out;
           },
           "raw trace index i of every example in the split")
      .def("window", [](const WindowedDataset& d, std::size_t k) {
        if (k >= d.size()) throw RangeError("example index out of range");
        return to_array(d.window(k));
      })
      .def("only_source", &WindowedDataset::only_source)
      .def("manifest_json", [](const WindowedDataset& d) { return describe(d).to_json(); });

  // --- models ---
  m.def("full_preset", [](const std::string& kind, const std::string& cond, bool with_pooling) {
    return full_preset(model_kind_from(kind), condition_from(cond), with_pooling).to_json();
  }, py::arg("kind"), py::arg("condition") = "ch", py::arg("with_pooling") = false);
  m.def("desk_preset", [](const std::string& kind, const std::string& cond) {
    return desk_preset(model_kind_from(kind), condition_from(cond)).to_json();
  }, py::arg("kind"), py::arg("condition") = "ch");
  m.def("lr_at_epoch", &nn::lr_at_epoch, py::arg("lr0"), py::arg("epoch"));
  m.def("epoch_avg_loss", [](const std::vector<double>& v) { return epoch_avg_loss(v); });

  py::class_<Model>(m, "Model")
      .def(py::init([](const std::string& config_json) { return build_model(ModelConfig::from_json(config_json)); }),
           py::arg("config_json"))
      .def_property_readonly("config_json", [](const Model& x) { return x.config().to_json(); })
      .def_property_readonly("parameter_count", &Model::parameter_count)
      .def(
          "predict",
          [](const Model& x, const Bits& window, bool clamp) {
            auto w = to_bits(window);
            Prediction p = x.predict(w);
            return clamp ? p.clamped : p.raw;
          },
          py::arg("window"), py::arg("clamp") = false)
      .def("save", [](const Model& x, const std::filesystem::path& p) { save_model(p, x); });
  m.def("load_model", &load_model);

  m.def(
      "fit",
      [](const std::string& config_json, const WindowedDataset& data) {
        ModelConfig c = ModelConfig::from_json(config_json);
        std::optional<TrainedModel> t;
        {
          py::gil_scoped_release release;
          t.emplace(fit(build_model(c), data));
        }
        py::list hist;
        for (const auto& h : t->history) {
          py::dict d;
          d["epoch"] = h.epoch;
          d["train_loss"] = h.train_loss;
          d["val_loss"] = h.val_loss;
          d["val_mse"] = h.val_mse;
          d["lr"] = h.lr;
          hist.append(d);
        }
        return py::make_tuple(std::move(t->model), hist, t->best_epoch);
      },
      py::arg("config_json"), py::arg("dataset"), "Train; returns (model, history, best_epoch).");

  // --- evaluation ---
  m.def(
      "error_series",
      [](const Model& x, const WindowedDataset& d, bool clamped) {
        ErrorSeries es = error_series(x, d);
        return to_array(std::span<const double>(clamped ? es.clamped : es.raw));
      },
      py::arg("model"), py::arg("dataset"), py::arg("clamped") = true);
  m.def("percentile", [](const std::vector<double>& v, double p) { return percentile(v, p); });
  m.def("metrics_report", [](const std::vector<double>& e) { return report_dict(metrics_report(e)); });
  m.def(
      "profile_inference",
      [](const Model& x, const std::vector<Bits>& windows, std::size_t repetitions) {
        std::vector<std::vector<std::uint8_t>> w;
        for (const auto& a : windows) w.push_back(to_bits(a));
        ResourceProfile p;
        {
          py::gil_scoped_release release;
          p = profile_inference(x, w, repetitions);
        }
        py::dict d;
        d["model"] = p.model;
        d["condition"] = p.condition;
        d["mean_ms"] = p.mean_ms;
        d["mem_mb"] = p.mem_mb;
        d["peak_mb"] = p.peak_mb;
        d["param_mb"] = p.param_mb;
        d["method"] = p.method;
        return d;
      },
      py::arg("model"), py::arg("windows"), py::arg("repetitions") = 1000);
}
