#include "svcmimo/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "svcmimo/errors.hpp"
#include "svcmimo/io_util.hpp"
#include "svcmimo/presets.hpp"
#include "svcmimo/quality.hpp"
#include "svcmimo/version.hpp"
#include "svcmimo/yuv_io.hpp"

namespace svcmimo::cli {

const char* command_name(Command cmd) {
  switch (cmd) {
    case Command::Simulate: return "simulate";
    case Command::Sweep: return "sweep";
    case Command::Calibrate: return "calibrate";
    case Command::Fit: return "fit";
    case Command::Predict: return "predict";
    default: return "metrics";
  }
}

namespace {

constexpr const char* kPresetPrefix = "preset:";

struct RawValue {
  std::string value;
  std::string where;  // "file:line" or "flag"
};

using RawConfig = std::map<std::string, RawValue>;

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "trace", "video", "video_base", "video_enh", "video_ref", "video_in", "samples",
      "model", "out", "base_width", "base_height", "base_fps", "enh_width", "enh_height",
      "enh_fps", "ntx", "nusers", "nrx", "mod_order", "total_db", "p1_min_db", "p1_max_db",
      "step_db", "n_trials", "p1_db", "si", "ti", "target_per", "seed", "threads"};
  return keys;
}

bool is_known_key(const std::string& key) {
  for (const std::string& k : known_keys())
    if (k == key) return true;
  return false;
}

void trim(std::string& s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  s = s.substr(b, e - b);
}

void add_entry(RawConfig& raw, const std::string& entry, const std::string& where,
               bool allow_duplicate) {
  const std::size_t eq = entry.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected 'key = value' (" + where + "): '" + entry + "'");
  std::string key = entry.substr(0, eq);
  std::string value = entry.substr(eq + 1);
  trim(key);
  trim(value);
  if (key.empty()) throw ConfigError("empty key (" + where + ")");
  if (!is_known_key(key)) throw ConfigError("unknown key '" + key + "' (" + where + ")");
  if (!allow_duplicate && raw.count(key))
    throw ConfigError("duplicate key '" + key + "' (" + where + ")");
  raw[key] = {value, where};
}

RawConfig read_config_file(const std::string& path) {
  RawConfig raw;
  if (path.empty()) return raw;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    trim(line);
    if (line.empty()) continue;
    add_entry(raw, line, path + ":" + std::to_string(line_no), /*allow_duplicate=*/false);
  }
  return raw;
}

class ConfigReader {
 public:
  explicit ConfigReader(const RawConfig& raw) : raw_(raw) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  void get(const std::string& key, std::string& out) const {
    const auto it = raw_.find(key);
    if (it != raw_.end()) out = it->second.value;
  }

  void get(const std::string& key, double& out) const {
    number(key, out, [](const std::string& v, std::size_t& pos) { return std::stod(v, &pos); });
  }

  void get(const std::string& key, int& out) const {
    number(key, out, [](const std::string& v, std::size_t& pos) {
      const long val = std::stol(v, &pos);
      if (val < std::numeric_limits<int>::min() || val > std::numeric_limits<int>::max())
        throw std::out_of_range(v);
      return static_cast<int>(val);
    });
  }

  void get(const std::string& key, std::uint64_t& out) const {
    number(key, out, [](const std::string& v, std::size_t& pos) { return std::stoull(v, &pos); });
  }

  void get(const std::string& key, std::optional<double>& out) const {
    if (!has(key)) return;
    double v = 0.0;
    get(key, v);
    out = v;
  }

 private:
  template <typename T, typename Fn>
  void number(const std::string& key, T& out, const Fn& parse) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return;
    const std::string& v = it->second.value;
    try {
      std::size_t pos = 0;
      const T value = parse(v, pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      out = value;
    } catch (const std::exception&) {
      throw ConfigError(key + ": expected a number, got '" + v + "' (" + it->second.where +
                        ")");
    }
  }

  const RawConfig& raw_;
};

void require(const RunConfig& rc, bool ok, const std::string& what) {
  if (!ok)
    throw ConfigError(std::string(command_name(rc.command)) + ": " + what);
}

bool has_file_video(const RunConfig& rc) {
  return !rc.video_base.empty() || !rc.video_enh.empty() || !rc.video_ref.empty();
}

bool wants_video(const RunConfig& rc) { return !rc.video.empty() || has_file_video(rc); }

void validate_config(RunConfig& rc) {
  // channel and geometry invariants hold before any work starts; the
  // two-layer geometry cross-checks only bind commands that use it
  if (rc.base_fps < 1 || rc.enh_fps < 1 || rc.enh_fps % rc.base_fps != 0)
    throw ConfigError("enh_fps must be an integer multiple of base_fps");
  if (rc.base_width < 2 || rc.base_height < 2 || rc.base_width % 2 || rc.base_height % 2 ||
      rc.enh_width % 2 || rc.enh_height % 2)
    throw ConfigError("video dimensions must be even and >= 2");
  const bool layered = rc.command == Command::Simulate || rc.command == Command::Sweep ||
                       rc.command == Command::Calibrate;
  if (layered && (rc.base_width > rc.enh_width || rc.base_height > rc.enh_height))
    throw ConfigError("base dimensions must not exceed enhancement dimensions");
  try {
    rc.channel.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (rc.threads < 0) throw ConfigError("threads must be >= 0");
  const bool uses_layered_video =
      rc.command == Command::Sweep || rc.command == Command::Simulate;
  if (!rc.video.empty()) {
    if (rc.video.rfind(kPresetPrefix, 0) != 0 || !is_preset(rc.video.substr(7)))
      throw ConfigError("video: expected preset:{base-heavy|enh-heavy|balanced} or "
                        "video_base/video_enh/video_ref paths");
    if (has_file_video(rc))
      throw ConfigError("video: preset and explicit YUV paths are mutually exclusive");
  } else if (uses_layered_video && has_file_video(rc)) {
    if (rc.video_base.empty() || rc.video_enh.empty() || rc.video_ref.empty())
      throw ConfigError("video: video_base, video_enh and video_ref must all be set");
  }

  switch (rc.command) {
    case Command::Simulate:
      require(rc, !rc.trace.empty(), "missing required key 'trace'");
      if (rc.p1_db) {
        try {
          (void)PowerSplit::from_base_db(rc.total_db, *rc.p1_db);
        } catch (const std::exception& e) {
          throw ConfigError(e.what());
        }
      }
      break;
    case Command::Sweep: {
      require(rc, !rc.trace.empty(), "missing required key 'trace'");
      require(rc, wants_video(rc), "missing video input (video = preset:... or YUV paths)");
      SweepConfig sc;
      sc.total_db = rc.total_db;
      sc.p1_min_db = rc.p1_min_db;
      sc.p1_max_db = rc.p1_max_db;
      sc.step_db = rc.step_db;
      sc.n_trials = rc.n_trials;
      sc.threads = rc.threads;
      try {
        sc.validate();
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      break;
    }
    case Command::Calibrate:
      require(rc, !rc.trace.empty(), "missing required key 'trace'");
      if (!(rc.target_per > 0.0 && rc.target_per < 1.0))
        throw ConfigError("target_per must lie in the open interval (0, 1)");
      break;
    case Command::Fit:
      require(rc, !rc.samples.empty(), "missing required key 'samples'");
      break;
    case Command::Predict:
      require(rc, !rc.model.empty(), "missing required key 'model'");
      require(rc, rc.p1_db.has_value(), "missing required key 'p1_db'");
      require(rc, rc.si.has_value(), "missing required key 'si'");
      require(rc, rc.ti.has_value(), "missing required key 'ti'");
      break;
    case Command::Metrics:
      require(rc, !rc.video_in.empty(), "missing required key 'video_in'");
      require(rc, !rc.video_ref.empty(), "missing required key 'video_ref'");
      break;
  }
}

}  // namespace

RunConfig parse_config(Command command, const std::string& config_path,
                       const std::vector<std::string>& overrides) {
  RawConfig raw = read_config_file(config_path);
  for (const std::string& entry : overrides)
    add_entry(raw, entry, "flag", /*allow_duplicate=*/true);

  RunConfig rc;
  rc.command = command;
  ConfigReader reader(raw);
  reader.get("trace", rc.trace);
  reader.get("video", rc.video);
  reader.get("video_base", rc.video_base);
  reader.get("video_enh", rc.video_enh);
  reader.get("video_ref", rc.video_ref);
  reader.get("video_in", rc.video_in);
  reader.get("samples", rc.samples);
  reader.get("model", rc.model);
  reader.get("out", rc.out);
  reader.get("base_width", rc.base_width);
  reader.get("base_height", rc.base_height);
  reader.get("base_fps", rc.base_fps);
  reader.get("enh_width", rc.enh_width);
  reader.get("enh_height", rc.enh_height);
  reader.get("enh_fps", rc.enh_fps);
  reader.get("ntx", rc.channel.n_tx);
  reader.get("nusers", rc.channel.n_users);
  reader.get("nrx", rc.channel.n_rx);
  reader.get("mod_order", rc.channel.mod_order);
  reader.get("total_db", rc.total_db);
  reader.get("p1_min_db", rc.p1_min_db);
  reader.get("p1_max_db", rc.p1_max_db);
  reader.get("step_db", rc.step_db);
  reader.get("n_trials", rc.n_trials);
  reader.get("p1_db", rc.p1_db);
  reader.get("si", rc.si);
  reader.get("ti", rc.ti);
  reader.get("target_per", rc.target_per);
  reader.get("seed", rc.seed);
  reader.get("threads", rc.threads);

  validate_config(rc);
  return rc;
}

namespace {

std::string canonical_config(const RunConfig& rc) {
  std::ostringstream os;
  os.precision(17);
  os << "command=" << command_name(rc.command) << '\n'
     << "trace=" << rc.trace << '\n'
     << "video=" << rc.video << '\n'
     << "video_base=" << rc.video_base << '\n'
     << "video_enh=" << rc.video_enh << '\n'
     << "video_ref=" << rc.video_ref << '\n'
     << "video_in=" << rc.video_in << '\n'
     << "samples=" << rc.samples << '\n'
     << "model=" << rc.model << '\n'
     << "base=" << rc.base_width << 'x' << rc.base_height << '@' << rc.base_fps << '\n'
     << "enh=" << rc.enh_width << 'x' << rc.enh_height << '@' << rc.enh_fps << '\n'
     << "channel=" << rc.channel.n_tx << '/' << rc.channel.n_users << '/' << rc.channel.n_rx
     << '/' << rc.channel.mod_order << '\n'
     << "total_db=" << rc.total_db << '\n'
     << "p1_range=" << rc.p1_min_db << ':' << rc.p1_max_db << ':' << rc.step_db << '\n'
     << "n_trials=" << rc.n_trials << '\n';
  if (rc.p1_db) os << "p1_db=" << *rc.p1_db << '\n';
  if (rc.si) os << "si=" << *rc.si << '\n';
  if (rc.ti) os << "ti=" << *rc.ti << '\n';
  os << "target_per=" << rc.target_per << '\n'
     << "seed=" << rc.seed << '\n';
  return os.str();
}

std::filesystem::path out_path(const RunConfig& rc, const std::string& name) {
  return std::filesystem::path(rc.out) / name;
}

void write_manifest(const RunConfig& rc, const std::vector<std::string>& outputs) {
  AtomicFile file(out_path(rc, "run_manifest.txt").string());
  auto& out = file.stream();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(canonical_config(rc)));
  out << "version = " << kVersion << '\n'
      << "command = " << command_name(rc.command) << '\n'
      << "config_hash = " << buf << '\n'
      << "seed = " << rc.seed << '\n'
      << "threads = " << rc.threads << '\n';
  for (const std::string& o : outputs) out << "output = " << o << '\n';
  file.commit();
}

TraceGeometry geometry(const RunConfig& rc) {
  return {rc.base_fps, rc.enh_fps, rc.base_width, rc.base_height,
          rc.enh_width, rc.enh_height};
}

PacketTrace load_trace_rc(const RunConfig& rc) {
  if (rc.trace.rfind(kPresetPrefix, 0) == 0) return preset_trace(rc.trace.substr(7));
  return load_trace(rc.trace, geometry(rc));
}

LayeredVideo load_video_rc(const RunConfig& rc) {
  if (!rc.video.empty()) return preset_video(rc.video.substr(7));
  LayeredVideo video;
  video.base_frames = read_yuv(rc.video_base, rc.base_width, rc.base_height);
  video.enh_frames = read_yuv(rc.video_enh, rc.enh_width, rc.enh_height);
  video.ref_frames = read_yuv(rc.video_ref, rc.enh_width, rc.enh_height);
  video.validate();
  return video;
}

PowerSplit split_for(const RunConfig& rc) {
  if (rc.p1_db) return PowerSplit::from_base_db(rc.total_db, *rc.p1_db);
  return PowerSplit::equal(rc.total_db);
}

int cmd_simulate(const RunConfig& rc) {
  const PacketTrace trace = load_trace_rc(rc);
  const PowerSplit split = split_for(rc);
  const LossOutcome outcome = simulate_losses(trace, split, rc.channel, rc.seed);
  const LayerPer analytic = expected_per(trace, split, rc.channel);
  const TraceStats stats = trace_stats(trace);

  std::vector<std::string> outputs;
  write_loss_csv(outcome, trace, out_path(rc, "losses.csv").string());
  outputs.push_back("losses.csv");

  long long lost_base = 0, lost_enh = 0;
  for (std::size_t i : outcome.lost_packets)
    (trace.packets[i].layer == Layer::Base ? lost_base : lost_enh) += 1;

  std::printf("p1_db = %.4f\np2_db = %.4f\n", split.layer_db[0], split.layer_db[1]);
  std::printf("base: packets = %lld, lost = %lld, empirical_per = %.6g, analytic_per = %.6g\n",
              static_cast<long long>(stats.base.packet_count), lost_base, outcome.per_base,
              analytic.base);
  std::printf("enh: packets = %lld, lost = %lld, empirical_per = %.6g, analytic_per = %.6g\n",
              static_cast<long long>(stats.enh.packet_count), lost_enh, outcome.per_enh,
              analytic.enh);

  if (wants_video(rc)) {
    const LayeredVideo video = load_video_rc(rc);
    const Reconstruction recon = conceal(outcome, video, trace);
    const QualityReport report =
        video_metrics(recon.frames, video.ref_frames, rc.threads > 0 ? rc.threads : 1);
    write_metrics_csv(report, out_path(rc, "frame_metrics.csv").string());
    outputs.push_back("frame_metrics.csv");
    std::printf("mean_ssim = %.6f\nmean_psnr = %.4f\n", report.mean_ssim, report.mean_psnr);
  }
  write_manifest(rc, outputs);
  return 0;
}

int cmd_sweep(const RunConfig& rc) {
  const PacketTrace trace = load_trace_rc(rc);
  const LayeredVideo video = load_video_rc(rc);
  SweepConfig sc;
  sc.total_db = rc.total_db;
  sc.p1_min_db = rc.p1_min_db;
  sc.p1_max_db = rc.p1_max_db;
  sc.step_db = rc.step_db;
  sc.n_trials = rc.n_trials;
  sc.seed = rc.seed;
  sc.threads = rc.threads;
  const SweepResult result = sweep(trace, video, rc.channel, sc);
  write_sweep_csv(result, out_path(rc, "sweep.csv").string());
  const SweepPoint& best = result.points[result.best];
  const SweepPoint& eq = result.points[result.equal_split];
  std::printf("equal_split_db = %.4f\n", result.equal_split_db);
  std::printf("best: p1_db = %.4f, mean_ssim = %.6f, ci = %.6f\n", best.p1_db,
              best.mean_ssim, best.ci_halfwidth);
  std::printf("equal: p1_db = %.4f, mean_ssim = %.6f, ci = %.6f\n", eq.p1_db, eq.mean_ssim,
              eq.ci_halfwidth);
  write_manifest(rc, {"sweep.csv"});
  return 0;
}

int cmd_calibrate(const RunConfig& rc) {
  const PacketTrace trace = load_trace_rc(rc);
  const CalibrationResult result =
      calibrate(trace, default_candidate_set(), rc.target_per, rc.total_db);

  AtomicFile file(out_path(rc, "calibration.csv").string());
  auto& out = file.stream();
  out << "ntx,nusers,nrx,mod_order,total_per\n";
  char buf[96];
  for (const CandidateScore& cs : result.ranked) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.9e\n", cs.config.n_tx, cs.config.n_users,
                  cs.config.n_rx, cs.config.mod_order, cs.total_per);
    out << buf;
  }
  file.commit();

  std::printf("%s\n", result.note.c_str());
  std::printf("ntx = %d\nnusers = %d\nnrx = %d\nmod_order = %d\nachieved_per = %.6g\n",
              result.config.n_tx, result.config.n_users, result.config.n_rx,
              result.config.mod_order, result.achieved_per);
  write_manifest(rc, {"calibration.csv"});
  return 0;
}

std::vector<RegressionSample> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open samples file: " + path);
  std::vector<RegressionSample> samples;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "p1_db,si,ti,ssim")
        throw ParseError(path, line_no, "expected header 'p1_db,si,ti,ssim'");
      saw_header = true;
      continue;
    }
    RegressionSample s;
    double* fields[4] = {&s.p1, &s.si, &s.ti, &s.ssim};
    std::size_t start = 0;
    int n = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (n == 4) throw ParseError(path, line_no, "expected 4 fields");
        const std::string field = line.substr(start, i - start);
        try {
          std::size_t pos = 0;
          *fields[n] = std::stod(field, &pos);
          if (pos != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
          throw ParseError(path, line_no, "expected a number, got '" + field + "'");
        }
        ++n;
        start = i + 1;
      }
    }
    if (n != 4) throw ParseError(path, line_no, "expected 4 fields");
    samples.push_back(s);
  }
  if (samples.empty()) throw ValidationError("samples file has no data rows: " + path);
  return samples;
}

int cmd_fit(const RunConfig& rc) {
  const std::vector<RegressionSample> samples = load_samples(rc.samples);
  const RegressionModel model = fit_regression(samples);
  std::vector<double> actual, fitted;
  actual.reserve(samples.size());
  fitted.reserve(samples.size());
  for (const RegressionSample& s : samples) {
    actual.push_back(s.ssim);
    fitted.push_back(predict(model, s.p1, s.si, s.ti).raw);
  }
  const double r = pearson(fitted, actual);
  save_model(model, out_path(rc, "model.txt").string(), samples.size(), r);
  std::printf("a = %.10g\nb = %.10g\nc = %.10g\nd = %.10g\ne = %.10g\n", model.a, model.b,
              model.c, model.d, model.e);
  std::printf("train_pearson = %.6f\nn_samples = %zu\n", r, samples.size());
  write_manifest(rc, {"model.txt"});
  return 0;
}

int cmd_predict(const RunConfig& rc) {
  const RegressionModel model = load_model(rc.model);
  const Prediction pred = predict(model, *rc.p1_db, *rc.si, *rc.ti);
  AtomicFile file(out_path(rc, "prediction.txt").string());
  char buf[160];
  std::snprintf(buf, sizeof buf, "raw = %.10g\nvalue = %.10g\nclamped = %d\n", pred.raw,
                pred.value, pred.clamped ? 1 : 0);
  file.stream() << buf;
  file.commit();
  std::printf("%s", buf);
  write_manifest(rc, {"prediction.txt"});
  return 0;
}

int cmd_metrics(const RunConfig& rc) {
  const FrameSeq input = read_yuv(rc.video_in, rc.enh_width, rc.enh_height);
  const FrameSeq ref = read_yuv(rc.video_ref, rc.enh_width, rc.enh_height);
  const QualityReport report = video_metrics(input, ref, rc.threads > 0 ? rc.threads : 1);
  write_metrics_csv(report, out_path(rc, "frame_metrics.csv").string());
  std::printf("mean_ssim = %.6f\nmean_psnr = %.4f\n", report.mean_ssim, report.mean_psnr);
  std::printf("si = %.6f\n", spatial_info(ref));
  if (ref.size() >= 2) std::printf("ti = %.6f\n", temporal_info(ref));
  write_manifest(rc, {"frame_metrics.csv"});
  return 0;
}

int error_line(const char* category, const std::string& msg, int code) {
  std::fprintf(stderr, "error: %s: %s\n", category, msg.c_str());
  return code;
}

}  // namespace

int run(const RunConfig& rc) {
  try {
    std::filesystem::create_directories(rc.out);
    switch (rc.command) {
      case Command::Simulate: return cmd_simulate(rc);
      case Command::Sweep: return cmd_sweep(rc);
      case Command::Calibrate: return cmd_calibrate(rc);
      case Command::Fit: return cmd_fit(rc);
      case Command::Predict: return cmd_predict(rc);
      case Command::Metrics: return cmd_metrics(rc);
    }
    return 4;
  } catch (const ConfigError& e) {
    return error_line("config", e.what(), 2);
  } catch (const ParseError& e) {
    return error_line("data", e.what(), 3);
  } catch (const ValidationError& e) {
    return error_line("data", e.what(), 3);
  } catch (const CalibrationError& e) {
    return error_line("runtime", e.what(), 4);
  } catch (const std::invalid_argument& e) {
    return error_line("data", e.what(), 3);
  } catch (const std::domain_error& e) {
    return error_line("data", e.what(), 3);
  } catch (const std::exception& e) {
    return error_line("runtime", e.what(), 4);
  }
}

}  // namespace svcmimo::cli
