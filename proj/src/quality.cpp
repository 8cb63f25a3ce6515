#include "svcmimo/quality.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <thread>

#include "svcmimo/accum.hpp"
#include "svcmimo/errors.hpp"
#include "svcmimo/io_util.hpp"

namespace svcmimo {

namespace {

constexpr int kWin = 8;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

// Summed-area table over a luma plane; exact in 64-bit integers for any
// 8-bit frame that fits in memory.
void build_sat(const std::uint8_t* a, const std::uint8_t* b, int w, int h,
               std::vector<std::uint64_t>& sa, std::vector<std::uint64_t>& sb,
               std::vector<std::uint64_t>& saa, std::vector<std::uint64_t>& sbb,
               std::vector<std::uint64_t>& sab) {
  const int sw = w + 1;
  const std::size_t n = std::size_t(sw) * (h + 1);
  sa.assign(n, 0);
  sb.assign(n, 0);
  saa.assign(n, 0);
  sbb.assign(n, 0);
  sab.assign(n, 0);
  for (int y = 0; y < h; ++y) {
    std::uint64_t row_a = 0, row_b = 0, row_aa = 0, row_bb = 0, row_ab = 0;
    const std::size_t cur = std::size_t(y + 1) * sw;
    const std::size_t prev = std::size_t(y) * sw;
    for (int x = 0; x < w; ++x) {
      const std::uint64_t va = a[y * w + x];
      const std::uint64_t vb = b[y * w + x];
      row_a += va;
      row_b += vb;
      row_aa += va * va;
      row_bb += vb * vb;
      row_ab += va * vb;
      sa[cur + x + 1] = sa[prev + x + 1] + row_a;
      sb[cur + x + 1] = sb[prev + x + 1] + row_b;
      saa[cur + x + 1] = saa[prev + x + 1] + row_aa;
      sbb[cur + x + 1] = sbb[prev + x + 1] + row_bb;
      sab[cur + x + 1] = sab[prev + x + 1] + row_ab;
    }
  }
}

inline std::uint64_t window_sum(const std::vector<std::uint64_t>& sat, int sw, int x0,
                                int y0) {
  return sat[std::size_t(y0 + kWin) * sw + x0 + kWin] - sat[std::size_t(y0) * sw + x0 + kWin] -
         sat[std::size_t(y0 + kWin) * sw + x0] + sat[std::size_t(y0) * sw + x0];
}

void require_same_size(const Frame& a, const Frame& b, const char* who) {
  a.validate();
  b.validate();
  if (!a.same_size(b))
    throw ValidationError(std::string(who) + ": frame dimension mismatch");
}

double population_std(const std::vector<double>& values) {
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double mean = sum.value() / double(values.size());
  CompensatedSum sq;
  for (double v : values) sq.add((v - mean) * (v - mean));
  return std::sqrt(sq.value() / double(values.size()));
}

void check_sequence(const FrameSeq& video, const char* who) {
  if (video.empty()) throw ValidationError(std::string(who) + ": empty frame sequence");
  for (const Frame& f : video) {
    f.validate();
    if (!f.same_size(video.front()))
      throw ValidationError(std::string(who) + ": frames do not share dimensions");
  }
}

}  // namespace

double ssim_frame(const Frame& a, const Frame& b) {
  require_same_size(a, b, "ssim_frame");
  const int w = a.width, h = a.height;
  if (w < kWin || h < kWin)
    throw ValidationError("ssim_frame: frame smaller than the 8x8 window");

  thread_local std::vector<std::uint64_t> sa, sb, saa, sbb, sab;
  build_sat(a.y.data(), b.y.data(), w, h, sa, sb, saa, sbb, sab);

  constexpr double inv_n = 1.0 / (kWin * kWin);
  const int sw = w + 1;
  CompensatedSum total;
  for (int y0 = 0; y0 + kWin <= h; ++y0) {
    for (int x0 = 0; x0 + kWin <= w; ++x0) {
      const double mu_a = double(window_sum(sa, sw, x0, y0)) * inv_n;
      const double mu_b = double(window_sum(sb, sw, x0, y0)) * inv_n;
      const double var_a = double(window_sum(saa, sw, x0, y0)) * inv_n - mu_a * mu_a;
      const double var_b = double(window_sum(sbb, sw, x0, y0)) * inv_n - mu_b * mu_b;
      const double cov = double(window_sum(sab, sw, x0, y0)) * inv_n - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total.add(num / den);
    }
  }
  const double n_windows = double(h - kWin + 1) * double(w - kWin + 1);
  return total.value() / n_windows;
}

double psnr_frame(const Frame& a, const Frame& b) {
  require_same_size(a, b, "psnr_frame");
  std::uint64_t sse = 0;
  const std::size_t n = a.y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t d = std::int64_t(a.y[i]) - std::int64_t(b.y[i]);
    sse += std::uint64_t(d * d);
  }
  if (sse == 0) return kPsnrCapDb;
  const double mse = double(sse) / double(n);
  return std::min(kPsnrCapDb, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double spatial_info(const FrameSeq& video) {
  check_sequence(video, "spatial_info");
  const int w = video.front().width, h = video.front().height;
  if (w < 3 || h < 3) throw ValidationError("spatial_info: frames too small for Sobel");

  std::vector<double> mag;
  mag.reserve(std::size_t(w - 2) * (h - 2));
  double si = 0.0;
  for (const Frame& f : video) {
    mag.clear();
    const std::uint8_t* y = f.y.data();
    for (int r = 1; r + 1 < h; ++r) {
      for (int c = 1; c + 1 < w; ++c) {
        const int gx = -y[(r - 1) * w + c - 1] + y[(r - 1) * w + c + 1] -
                       2 * y[r * w + c - 1] + 2 * y[r * w + c + 1] -
                       y[(r + 1) * w + c - 1] + y[(r + 1) * w + c + 1];
        const int gy = -y[(r - 1) * w + c - 1] - 2 * y[(r - 1) * w + c] -
                       y[(r - 1) * w + c + 1] + y[(r + 1) * w + c - 1] +
                       2 * y[(r + 1) * w + c] + y[(r + 1) * w + c + 1];
        mag.push_back(std::sqrt(double(gx) * gx + double(gy) * gy));
      }
    }
    si = std::max(si, population_std(mag));
  }
  return si;
}

double temporal_info(const FrameSeq& video) {
  check_sequence(video, "temporal_info");
  if (video.size() < 2)
    throw ValidationError("temporal_info: need at least two frames");
  std::vector<double> diff;
  diff.reserve(video.front().y.size());
  double ti = 0.0;
  for (std::size_t i = 1; i < video.size(); ++i) {
    diff.clear();
    const auto& cur = video[i].y;
    const auto& prev = video[i - 1].y;
    for (std::size_t k = 0; k < cur.size(); ++k)
      diff.push_back(double(cur[k]) - double(prev[k]));
    ti = std::max(ti, population_std(diff));
  }
  return ti;
}

QualityReport video_metrics(const FrameSeq& recon, const FrameSeq& ref, int threads) {
  check_sequence(recon, "video_metrics");
  check_sequence(ref, "video_metrics");
  if (recon.size() != ref.size())
    throw ValidationError("video_metrics: frame count mismatch");
  if (!recon.front().same_size(ref.front()))
    throw ValidationError("video_metrics: frame dimension mismatch");

  const std::size_t n = recon.size();
  QualityReport report;
  report.frame_ssim.resize(n);
  report.frame_psnr.resize(n);

  auto score = [&](std::size_t i) {
    report.frame_ssim[i] = ssim_frame(recon[i], ref[i]);
    report.frame_psnr[i] = psnr_frame(recon[i], ref[i]);
  };

  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) score(i);
  } else {
    const int n_workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += n_workers) score(i);
      });
    for (auto& th : pool) th.join();
  }

  CompensatedSum ssim_sum, psnr_sum;
  for (double v : report.frame_ssim) ssim_sum.add(v);
  for (double v : report.frame_psnr) psnr_sum.add(v);
  report.mean_ssim = ssim_sum.value() / double(n);
  report.mean_psnr = psnr_sum.value() / double(n);
  return report;
}

void write_metrics_csv(const QualityReport& report, const std::string& path) {
  AtomicFile file(path);
  auto& out = file.stream();
  out << "frame_idx,ssim,psnr\n";
  char buf[96];
  for (std::size_t i = 0; i < report.frame_ssim.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.4f\n", i, report.frame_ssim[i],
                  report.frame_psnr[i]);
    out << buf;
  }
  file.commit();
}

}  // namespace svcmimo
