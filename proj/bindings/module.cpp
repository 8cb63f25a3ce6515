#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <cstring>

#include "svcmimo/errors.hpp"
#include "svcmimo/frame.hpp"
#include "svcmimo/link_model.hpp"
#include "svcmimo/loss_sim.hpp"
#include "svcmimo/presets.hpp"
#include "svcmimo/quality.hpp"
#include "svcmimo/svc_trace.hpp"
#include "svcmimo/uep_opt.hpp"
#include "svcmimo/version.hpp"

namespace py = pybind11;
using namespace svcmimo;

namespace {

using LumaArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Frame frame_from_luma(const LumaArray& luma) {
  if (luma.ndim() != 2) throw std::invalid_argument("expected a 2-D uint8 luma array");
  const int h = int(luma.shape(0));
  const int w = int(luma.shape(1));
  Frame f = Frame::solid(w, h, 0, 128);
  std::memcpy(f.y.data(), luma.data(), f.y.size());
  return f;
}

FrameSeq frames_from_luma(const LumaArray& stack) {
  if (stack.ndim() != 3) throw std::invalid_argument("expected an [n, h, w] uint8 array");
  const int n = int(stack.shape(0));
  const int h = int(stack.shape(1));
  const int w = int(stack.shape(2));
  FrameSeq seq;
  seq.reserve(std::size_t(n));
  const std::size_t plane = std::size_t(w) * h;
  for (int i = 0; i < n; ++i) {
    Frame f = Frame::solid(w, h, 0, 128);
    std::memcpy(f.y.data(), stack.data() + std::size_t(i) * plane, plane);
    seq.push_back(std::move(f));
  }
  return seq;
}

py::array_t<std::uint8_t> luma_to_array(const FrameSeq& frames) {
  const int n = int(frames.size());
  const int h = frames.empty() ? 0 : frames.front().height;
  const int w = frames.empty() ? 0 : frames.front().width;
  py::array_t<std::uint8_t> out({n, h, w});
  const std::size_t plane = std::size_t(w) * h;
  for (int i = 0; i < n; ++i)
    std::memcpy(out.mutable_data() + std::size_t(i) * plane, frames[std::size_t(i)].y.data(),
                plane);
  return out;
}

}  // namespace

PYBIND11_MODULE(_svcmimo, m) {
  m.doc() = "link-level simulator and power-allocation optimizer for layered video over a "
            "massive-MIMO downlink";
  m.attr("__version__") = kVersion;

  py::class_<ChannelConfig>(m, "ChannelConfig")
      .def(py::init<>())
      .def(py::init([](int n_tx, int n_users, int n_rx, int mod_order) {
             ChannelConfig cfg{n_tx, n_users, n_rx, mod_order};
             cfg.validate();
             return cfg;
           }),
           py::arg("n_tx"), py::arg("n_users"), py::arg("n_rx"), py::arg("mod_order"))
      .def_readwrite("n_tx", &ChannelConfig::n_tx)
      .def_readwrite("n_users", &ChannelConfig::n_users)
      .def_readwrite("n_rx", &ChannelConfig::n_rx)
      .def_readwrite("mod_order", &ChannelConfig::mod_order)
      .def("validate", &ChannelConfig::validate)
      .def("__repr__", [](const ChannelConfig& c) {
        return "ChannelConfig(n_tx=" + std::to_string(c.n_tx) +
               ", n_users=" + std::to_string(c.n_users) + ", n_rx=" + std::to_string(c.n_rx) +
               ", mod_order=" + std::to_string(c.mod_order) + ")";
      });

  py::class_<PowerSplit>(m, "PowerSplit")
      .def_static("equal", &PowerSplit::equal, py::arg("total_db"), py::arg("n_layers") = 2)
      .def_static("from_base_db", &PowerSplit::from_base_db, py::arg("total_db"),
                  py::arg("base_db"))
      .def_readonly("total_db", &PowerSplit::total_db)
      .def_readonly("layer_db", &PowerSplit::layer_db)
      .def("layer_linear", &PowerSplit::layer_linear);

  m.def("db_to_linear", &db_to_linear, py::arg("p_db"));
  m.def("linear_to_db", &linear_to_db, py::arg("p_lin"));
  m.def("stream_snr", &stream_snr, py::arg("p_lin"), py::arg("cfg"));
  m.def("bit_error_prob", &bit_error_prob, py::arg("p_lin"), py::arg("cfg"));
  m.def("packet_error_rate", &packet_error_rate, py::arg("pb"), py::arg("length_bits"));

  py::class_<PacketTrace>(m, "PacketTrace")
      .def_readonly("n_base_frames", &PacketTrace::n_base_frames)
      .def_readonly("n_enh_frames", &PacketTrace::n_enh_frames)
      .def_property_readonly("n_packets",
                             [](const PacketTrace& t) { return t.packets.size(); })
      .def("packets",
           [](const PacketTrace& t) {
             py::list out;
             for (const Packet& p : t.packets)
               out.append(py::make_tuple(layer_name(p.layer), p.frame_idx, p.length_bits));
             return out;
           })
      .def("__repr__", [](const PacketTrace& t) {
        return "PacketTrace(" + std::to_string(t.packets.size()) + " packets, " +
               std::to_string(t.n_base_frames) + "+" + std::to_string(t.n_enh_frames) +
               " frames)";
      });

  m.def("load_trace", [](const std::string& path) { return load_trace(path); },
        py::arg("path"));
  m.def("save_trace", &save_trace, py::arg("trace"), py::arg("path"));
  m.def(
      "synth_trace",
      [](int n_frames, std::int64_t base_mean, std::int64_t enh_mean, double dispersion,
         std::uint64_t seed) {
        return synth_trace(n_frames, base_mean, enh_mean, dispersion, seed);
      },
      py::arg("n_frames"), py::arg("base_mean_bits"), py::arg("enh_mean_bits"),
      py::arg("dispersion"), py::arg("seed"));
  m.def("trace_stats", [](const PacketTrace& t) {
    const TraceStats s = trace_stats(t);
    py::dict out;
    for (const auto& [name, ls] : {std::pair{"base", s.base}, std::pair{"enh", s.enh}}) {
      py::dict layer;
      layer["packet_count"] = ls.packet_count;
      layer["mean_bits"] = ls.mean_bits;
      layer["max_bits"] = ls.max_bits;
      layer["total_bits"] = ls.total_bits;
      out[name] = layer;
    }
    out["base_mean_exceeds_enh"] = s.base_mean_exceeds_enh;
    return out;
  });

  py::class_<LossOutcome>(m, "LossOutcome")
      .def_readonly("lost_packets", &LossOutcome::lost_packets)
      .def_readonly("lost_base_frames", &LossOutcome::lost_base_frames)
      .def_readonly("lost_enh_frames", &LossOutcome::lost_enh_frames)
      .def_readonly("per_base", &LossOutcome::per_base)
      .def_readonly("per_enh", &LossOutcome::per_enh);

  m.def("simulate_losses", &simulate_losses, py::arg("trace"), py::arg("split"),
        py::arg("cfg"), py::arg("seed"));
  m.def("expected_per",
        [](const PacketTrace& t, const PowerSplit& s, const ChannelConfig& c) {
          const LayerPer per = expected_per(t, s, c);
          return py::make_tuple(per.base, per.enh);
        });
  m.def("expected_total_per", &expected_total_per);

  py::class_<LayeredVideo>(m, "LayeredVideo")
      .def_property_readonly("n_base_frames",
                             [](const LayeredVideo& v) { return v.base_frames.size(); })
      .def_property_readonly("n_enh_frames",
                             [](const LayeredVideo& v) { return v.enh_frames.size(); })
      .def("base_luma", [](const LayeredVideo& v) { return luma_to_array(v.base_frames); })
      .def("enh_luma", [](const LayeredVideo& v) { return luma_to_array(v.enh_frames); })
      .def("ref_luma", [](const LayeredVideo& v) { return luma_to_array(v.ref_frames); });

  m.def(
      "video_from_luma",
      [](const LumaArray& base, const LumaArray& enh, const LumaArray& ref) {
        LayeredVideo v;
        v.base_frames = frames_from_luma(base);
        v.enh_frames = frames_from_luma(enh);
        v.ref_frames = frames_from_luma(ref);
        v.validate();
        return v;
      },
      py::arg("base"), py::arg("enh"), py::arg("ref"));

  m.def("conceal", [](const LossOutcome& o, const LayeredVideo& v, const PacketTrace& t) {
    const Reconstruction recon = conceal(o, v, t);
    py::list provenance;
    for (Provenance p : recon.provenance) provenance.append(provenance_name(p));
    return py::make_tuple(luma_to_array(recon.frames), provenance);
  });

  m.def("ssim", [](const LumaArray& a, const LumaArray& b) {
    return ssim_frame(frame_from_luma(a), frame_from_luma(b));
  });
  m.def("psnr", [](const LumaArray& a, const LumaArray& b) {
    return psnr_frame(frame_from_luma(a), frame_from_luma(b));
  });
  m.def("spatial_info",
        [](const LumaArray& stack) { return spatial_info(frames_from_luma(stack)); });
  m.def("temporal_info",
        [](const LumaArray& stack) { return temporal_info(frames_from_luma(stack)); });

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("total_db", &SweepConfig::total_db)
      .def_readwrite("p1_min_db", &SweepConfig::p1_min_db)
      .def_readwrite("p1_max_db", &SweepConfig::p1_max_db)
      .def_readwrite("step_db", &SweepConfig::step_db)
      .def_readwrite("n_trials", &SweepConfig::n_trials)
      .def_readwrite("seed", &SweepConfig::seed)
      .def_readwrite("threads", &SweepConfig::threads);

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("p1_db", &SweepPoint::p1_db)
      .def_readonly("p2_db", &SweepPoint::p2_db)
      .def_readonly("per_base", &SweepPoint::per_base)
      .def_readonly("per_enh", &SweepPoint::per_enh)
      .def_readonly("mean_ssim", &SweepPoint::mean_ssim)
      .def_readonly("ci_halfwidth", &SweepPoint::ci_halfwidth)
      .def_readonly("lost_base", &SweepPoint::lost_base)
      .def_readonly("lost_enh", &SweepPoint::lost_enh);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("points", &SweepResult::points)
      .def_readonly("best", &SweepResult::best)
      .def_readonly("equal_split", &SweepResult::equal_split)
      .def_readonly("equal_split_db", &SweepResult::equal_split_db);

  m.def("sweep", &sweep, py::arg("trace"), py::arg("video"), py::arg("cfg"), py::arg("sc"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<RegressionModel>(m, "RegressionModel")
      .def(py::init([](double a, double b, double c, double d, double e) {
             return RegressionModel{a, b, c, d, e};
           }),
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("e"))
      .def_readonly("a", &RegressionModel::a)
      .def_readonly("b", &RegressionModel::b)
      .def_readonly("c", &RegressionModel::c)
      .def_readonly("d", &RegressionModel::d)
      .def_readonly("e", &RegressionModel::e);

  m.def("fit_regression", [](const std::vector<std::array<double, 4>>& rows) {
    std::vector<RegressionSample> samples;
    samples.reserve(rows.size());
    for (const auto& r : rows) samples.push_back({r[0], r[1], r[2], r[3]});
    return fit_regression(samples);
  });
  m.def("predict", [](const RegressionModel& model, double p1, double si, double ti) {
    const Prediction p = predict(model, p1, si, ti);
    return py::make_tuple(p.value, p.raw, p.clamped);
  });
  m.def("pearson", &pearson, py::arg("xs"), py::arg("ys"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"),
        py::arg("n_samples") = 0, py::arg("train_pearson") = 0.0);
  m.def("load_model", &load_model, py::arg("path"));

  py::class_<CalibrationResult>(m, "CalibrationResult")
      .def_readonly("config", &CalibrationResult::config)
      .def_readonly("achieved_per", &CalibrationResult::achieved_per)
      .def_readonly("note", &CalibrationResult::note);

  m.def("default_candidate_set", &default_candidate_set);
  m.def(
      "calibrate",
      [](const PacketTrace& trace, double target_per, double total_db) {
        return calibrate(trace, default_candidate_set(), target_per, total_db);
      },
      py::arg("trace"), py::arg("target_per"), py::arg("total_db") = 5.50);

  m.def("preset_names", [] { return preset_names(); });
  m.def("preset_trace", &preset_trace, py::arg("name"));
  m.def("preset_video", &preset_video, py::arg("name"));

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<CalibrationError>(m, "CalibrationError");
}
