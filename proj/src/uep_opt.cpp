#include "svcmimo/uep_opt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "svcmimo/accum.hpp"
#include "svcmimo/errors.hpp"
#include "svcmimo/io_util.hpp"
#include "svcmimo/quality.hpp"
#include "svcmimo/rng.hpp"

namespace svcmimo {

void SweepConfig::validate() const {
  if (!(step_db > 0.0)) throw ValidationError("sweep: step_db must be > 0");
  if (n_trials < 1) throw ValidationError("sweep: n_trials must be >= 1");
  if (p1_min_db > p1_max_db) throw ValidationError("sweep: grid is empty (p1_min > p1_max)");
  if (db_to_linear(p1_max_db) >= db_to_linear(total_db))
    throw ValidationError("sweep: p1 range must stay within the linear power budget");
  if (threads < 0) throw ValidationError("sweep: threads must be >= 0");
}

namespace {

void parallel_for_impl(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  int n_workers = threads;
  if (n_workers <= 0) n_workers = int(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = int(std::min<std::size_t>(n_workers, n));
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = std::size_t(t); i < n; i += std::size_t(n_workers)) body(i);
    });
  for (auto& th : pool) th.join();
}

// Memoized SSIM of "what a reconstructed frame holds" against the reference
// at output position k. A reconstructed frame is always one of: an intact
// enhancement frame, an upsampled base frame, or the mid-gray filler; the
// PrevCopy rule only forwards one of those contents. Values are pure
// functions of the clip, so concurrent lookups stay deterministic.
class SsimCache {
 public:
  enum Kind : std::uint64_t { kEnh = 0, kUp = 1, kGray = 2 };

  explicit SsimCache(const LayeredVideo& video)
      : video_(video),
        gray_(Frame::solid(video.enh_frames.front().width,
                           video.enh_frames.front().height, 128, 128)),
        upsampled_(video.base_frames.size()) {}

  double ssim_vs_ref(Kind kind, std::size_t idx, std::size_t k) {
    const std::uint64_t key =
        (std::uint64_t(kind) << 62) | (std::uint64_t(idx) << 31) | std::uint64_t(k);
    {
      std::shared_lock lock(mu_);
      const auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    const double value = ssim_frame(content(kind, idx), video_.ref_frames[k]);
    std::unique_lock lock(mu_);
    return memo_.emplace(key, value).first->second;
  }

 private:
  const Frame& content(Kind kind, std::size_t idx) {
    if (kind == kEnh) return video_.enh_frames[idx];
    if (kind == kGray) return gray_;
    std::scoped_lock lock(up_mu_);
    auto& slot = upsampled_[idx];
    if (!slot)
      slot = std::make_unique<Frame>(resize_bilinear(video_.base_frames[idx],
                                                     video_.enh_frames.front().width,
                                                     video_.enh_frames.front().height));
    return *slot;
  }

  const LayeredVideo& video_;
  Frame gray_;
  std::vector<std::unique_ptr<Frame>> upsampled_;
  std::unordered_map<std::uint64_t, double> memo_;
  std::shared_mutex mu_;
  std::mutex up_mu_;
};

// Mean SSIM of the concealed output without materializing any pixels;
// bit-identical to conceal() followed by video_metrics() because the frame
// contents and the accumulation order are the same.
double score_outcome(const LossOutcome& outcome, std::size_t n_base, std::size_t n_out,
                     SsimCache& cache) {
  std::vector<char> base_lost(n_base, 0);
  std::vector<char> enh_lost(n_out, 0);
  for (int f : outcome.lost_base_frames) base_lost[std::size_t(f)] = 1;
  for (int f : outcome.lost_enh_frames) enh_lost[std::size_t(f)] = 1;
  const std::size_t ratio = n_out / n_base;

  SsimCache::Kind kind = SsimCache::kGray;
  std::size_t idx = 0;
  CompensatedSum sum;
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t b = k / ratio;
    if (base_lost[b]) {
      if (k == 0) {
        kind = SsimCache::kGray;
        idx = 0;
      }
      // otherwise PrevCopy: the running (kind, idx) already points at the
      // content the previous output frame holds
    } else if (enh_lost[k]) {
      kind = SsimCache::kUp;
      idx = b;
    } else {
      kind = SsimCache::kEnh;
      idx = k;
    }
    sum.add(cache.ssim_vs_ref(kind, idx, k));
  }
  return sum.value() / double(n_out);
}

void check_trace_video(const PacketTrace& trace, const LayeredVideo& video) {
  const int ratio = trace.fps_ratio();
  const std::size_t n_base = video.base_frames.size();
  const std::size_t n_out = video.enh_frames.size();
  if (n_out != n_base * std::size_t(ratio))
    throw ValidationError(
        "sweep: enhancement frame count must be base count times the fps ratio");
  if (std::size_t(trace.n_base_frames) > n_base || std::size_t(trace.n_enh_frames) > n_out)
    throw ValidationError("sweep: trace references frames beyond the video");
  if (video.base_frames.front().width != trace.base_width ||
      video.base_frames.front().height != trace.base_height ||
      video.enh_frames.front().width != trace.enh_width ||
      video.enh_frames.front().height != trace.enh_height)
    throw ValidationError("sweep: video dimensions do not match the trace");
}

}  // namespace

SweepResult sweep(const PacketTrace& trace, const LayeredVideo& video,
                  const ChannelConfig& cfg, const SweepConfig& sc) {
  trace.validate();
  video.validate();
  cfg.validate();
  sc.validate();
  check_trace_video(trace, video);

  const std::size_t n_points =
      std::size_t((sc.p1_max_db - sc.p1_min_db) / sc.step_db + 1e-9) + 1;
  const std::size_t n_base = video.base_frames.size();
  const std::size_t n_out = video.enh_frames.size();

  SweepResult result;
  result.points.resize(n_points);
  result.equal_split_db = linear_to_db(db_to_linear(sc.total_db) / 2.0);

  SsimCache cache(video);
  parallel_for_impl(n_points, sc.threads, [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.p1_db = sc.p1_min_db + double(i) * sc.step_db;
    const PowerSplit split = PowerSplit::from_base_db(sc.total_db, pt.p1_db);
    pt.p2_db = split.layer_db[1];
    const LayerPer analytic = expected_per(trace, split, cfg);
    pt.per_base = analytic.base;
    pt.per_enh = analytic.enh;

    std::vector<double> scores(std::size_t(sc.n_trials));
    for (int t = 0; t < sc.n_trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(sc.seed, i, std::uint64_t(t));
      const LossOutcome outcome = simulate_losses(trace, split, cfg, trial_seed);
      scores[std::size_t(t)] = score_outcome(outcome, n_base, n_out, cache);
      for (std::size_t pi : outcome.lost_packets) {
        if (trace.packets[pi].layer == Layer::Base)
          pt.lost_base += 1;
        else
          pt.lost_enh += 1;
      }
    }
    CompensatedSum mean_sum;
    for (double s : scores) mean_sum.add(s);
    pt.mean_ssim = mean_sum.value() / double(sc.n_trials);
    if (sc.n_trials > 1) {
      CompensatedSum var_sum;
      for (double s : scores) var_sum.add((s - pt.mean_ssim) * (s - pt.mean_ssim));
      const double var = var_sum.value() / double(sc.n_trials - 1);
      pt.ci_halfwidth = 1.96 * std::sqrt(var / double(sc.n_trials));
    }
  });

  for (std::size_t i = 1; i < n_points; ++i)
    if (result.points[i].mean_ssim > result.points[result.best].mean_ssim) result.best = i;
  for (std::size_t i = 1; i < n_points; ++i)
    if (std::abs(result.points[i].p1_db - result.equal_split_db) <
        std::abs(result.points[result.equal_split].p1_db - result.equal_split_db))
      result.equal_split = i;
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  AtomicFile file(path);
  auto& out = file.stream();
  out << "p1_db,p2_db,per_base,per_enh,mean_ssim,ci\n";
  char buf[160];
  for (const SweepPoint& pt : result.points) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.9e,%.9e,%.6f,%.6f\n", pt.p1_db, pt.p2_db,
                  pt.per_base, pt.per_enh, pt.mean_ssim, pt.ci_halfwidth);
    out << buf;
  }
  file.commit();
}

RegressionModel fit_regression(const std::vector<RegressionSample>& samples) {
  constexpr int kF = 5;
  // Intercept first so a degenerate (constant) user column is reported under
  // its own name rather than as the intercept.
  static const char* kNames[kF] = {"intercept", "p1", "p1^2", "si", "ti"};
  if (samples.size() < std::size_t(kF))
    throw std::invalid_argument("fit_regression: need at least 5 samples");

  // normal equations, augmented with X^T y
  std::array<std::array<double, kF + 1>, kF> m{};
  for (const RegressionSample& s : samples) {
    const std::array<double, kF> row = {1.0, s.p1, s.p1 * s.p1, s.si, s.ti};
    for (int i = 0; i < kF; ++i) {
      for (int j = 0; j < kF; ++j) m[i][j] += row[i] * row[j];
      m[i][kF] += row[i] * s.ssim;
    }
  }

  std::array<double, kF> col_scale{};
  for (int k = 0; k < kF; ++k) col_scale[k] = m[k][k];

  // Gauss-Jordan with partial pivoting; a column without a usable pivot is
  // linearly dependent on the preceding ones.
  std::array<bool, kF> row_used{};
  std::array<int, kF> pivot_row;
  pivot_row.fill(-1);
  std::vector<std::string> collinear;
  for (int k = 0; k < kF; ++k) {
    int pr = -1;
    double best = 0.0;
    for (int r = 0; r < kF; ++r)
      if (!row_used[r] && std::abs(m[r][k]) > best) {
        best = std::abs(m[r][k]);
        pr = r;
      }
    if (pr < 0 || best <= 1e-10 * std::max(col_scale[k], 1e-30)) {
      collinear.push_back(kNames[k]);
      continue;
    }
    row_used[pr] = true;
    pivot_row[k] = pr;
    for (int r = 0; r < kF; ++r) {
      if (r == pr) continue;
      const double f = m[r][k] / m[pr][k];
      if (f == 0.0) continue;
      for (int c = k; c <= kF; ++c) m[r][c] -= f * m[pr][c];
      m[r][k] = 0.0;
    }
  }
  if (!collinear.empty()) {
    std::string joined;
    for (const std::string& name : collinear) {
      if (!joined.empty()) joined += ", ";
      joined += name;
    }
    throw ValidationError("fit_regression: rank-deficient design; collinear feature columns: " +
                          joined);
  }

  std::array<double, kF> beta{};
  for (int k = 0; k < kF; ++k) beta[k] = m[pivot_row[k]][kF] / m[pivot_row[k]][k];
  return {beta[2], beta[1], beta[3], beta[4], beta[0]};
}

Prediction predict(const RegressionModel& model, double p1, double si, double ti) {
  if (!std::isfinite(p1) || !std::isfinite(si) || !std::isfinite(ti))
    throw std::invalid_argument("predict: inputs must be finite");
  Prediction out;
  out.raw = model.a * p1 * p1 + model.b * p1 + model.c * si + model.d * ti + model.e;
  out.value = std::clamp(out.raw, -1.0, 1.0);
  out.clamped = out.value != out.raw;
  return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("pearson: input lengths differ");
  if (xs.size() < 2) throw std::domain_error("pearson: need at least two points");
  CompensatedSum sx, sy;
  for (double x : xs) sx.add(x);
  for (double y : ys) sy.add(y);
  const double mx = sx.value() / double(xs.size());
  const double my = sy.value() / double(ys.size());
  CompensatedSum sxy, sxx, syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (sxx.value() == 0.0 || syy.value() == 0.0)
    throw std::domain_error("pearson: undefined correlation (zero variance input)");
  return std::clamp(sxy.value() / std::sqrt(sxx.value() * syy.value()), -1.0, 1.0);
}

void save_model(const RegressionModel& model, const std::string& path,
                std::size_t n_samples, double train_pearson) {
  AtomicFile file(path);
  auto& out = file.stream();
  char buf[96];
  out << "# ssim = a*p1^2 + b*p1 + c*si + d*ti + e\n";
  const std::array<std::pair<const char*, double>, 5> coeffs = {
      {{"a", model.a}, {"b", model.b}, {"c", model.c}, {"d", model.d}, {"e", model.e}}};
  for (const auto& [name, value] : coeffs) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", name, value);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "n_samples = %zu\n", n_samples);
  out << buf;
  std::snprintf(buf, sizeof buf, "train_pearson = %.17g\n", train_pearson);
  out << buf;
  file.commit();
}

RegressionModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  RegressionModel model;
  std::array<bool, 5> seen{};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto is_space = [](char c) { return c == ' ' || c == '\t'; };
    std::size_t b = 0, e = line.size();
    while (b < e && is_space(line[b])) ++b;
    while (e > b && is_space(line[e - 1])) --e;
    if (b == e) continue;
    const std::string entry = line.substr(b, e - b);
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) throw ParseError(path, line_no, "expected 'key = value'");
    std::string key = entry.substr(0, eq);
    std::string value = entry.substr(eq + 1);
    while (!key.empty() && is_space(key.back())) key.pop_back();
    std::size_t vb = 0;
    while (vb < value.size() && is_space(value[vb])) ++vb;
    value = value.substr(vb);

    const auto parse_num = [&](const std::string& v) {
      try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        throw ParseError(path, line_no, "expected a number for '" + key + "', got '" + v + "'");
      }
    };

    if (key == "a") model.a = parse_num(value), seen[0] = true;
    else if (key == "b") model.b = parse_num(value), seen[1] = true;
    else if (key == "c") model.c = parse_num(value), seen[2] = true;
    else if (key == "d") model.d = parse_num(value), seen[3] = true;
    else if (key == "e") model.e = parse_num(value), seen[4] = true;
    else if (key == "n_samples" || key == "train_pearson") parse_num(value);
    else throw ParseError(path, line_no, "unknown key '" + key + "'");
  }
  for (int i = 0; i < 5; ++i)
    if (!seen[i])
      throw ParseError("model file " + path + " is missing coefficient '" +
                       std::string(1, char('a' + i)) + "'");
  if (!std::isfinite(model.a) || !std::isfinite(model.b) || !std::isfinite(model.c) ||
      !std::isfinite(model.d) || !std::isfinite(model.e))
    throw ParseError("model file " + path + " has non-finite coefficients");
  return model;
}

std::vector<ChannelConfig> default_candidate_set() {
  std::vector<ChannelConfig> set;
  for (int n_tx : {64, 96, 128, 160, 192, 224, 256, 320, 384, 448, 512})
    for (int n_users : {4, 8, 12, 16})
      for (int mod_order : {2, 4, 16})
        set.push_back(ChannelConfig{n_tx, n_users, 2, mod_order});
  return set;
}

CalibrationResult calibrate(const PacketTrace& trace,
                            const std::vector<ChannelConfig>& candidates, double target_per,
                            double total_db) {
  if (!(target_per > 0.0 && target_per < 1.0))
    throw std::invalid_argument("calibrate: target_per must lie in the open interval (0, 1)");
  if (candidates.empty()) throw std::invalid_argument("calibrate: empty candidate set");
  trace.validate();

  const PowerSplit split = PowerSplit::equal(total_db);
  CalibrationResult result;
  result.ranked.reserve(candidates.size());
  for (const ChannelConfig& cfg : candidates) {
    cfg.validate();
    result.ranked.push_back({cfg, expected_total_per(trace, split, cfg)});
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [&](const CandidateScore& lhs, const CandidateScore& rhs) {
                     return std::abs(lhs.total_per - target_per) <
                            std::abs(rhs.total_per - target_per);
                   });

  const auto describe = [](const CandidateScore& cs) {
    std::ostringstream os;
    os << "n_tx=" << cs.config.n_tx << " n_users=" << cs.config.n_users
       << " n_rx=" << cs.config.n_rx << " M=" << cs.config.mod_order
       << ": total PER " << cs.total_per;
    return os.str();
  };

  const CandidateScore& best = result.ranked.front();
  const double rel_err = std::abs(best.total_per - target_per) / target_per;
  if (rel_err > 0.25) {
    std::ostringstream os;
    os << "calibration failed: no candidate within 25% of target " << target_per
       << "; closest:";
    const std::size_t n_report = std::min<std::size_t>(3, result.ranked.size());
    for (std::size_t i = 0; i < n_report; ++i) os << "\n  " << describe(result.ranked[i]);
    throw CalibrationError(os.str());
  }

  result.config = best.config;
  result.achieved_per = best.total_per;
  std::ostringstream note;
  note << "selected " << describe(best) << " at the equal split of " << total_db
       << " dB (target " << target_per << ", relative error " << rel_err << ")";
  result.note = note.str();
  return result;
}

}  // namespace svcmimo
