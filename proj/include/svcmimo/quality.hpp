#pragma once

#include <string>
#include <vector>

#include "svcmimo/frame.hpp"

namespace svcmimo {

/// Per-frame and mean full-reference scores for a clip.
struct QualityReport {
  double mean_ssim = 0.0;
  double mean_psnr = 0.0;
  std::vector<double> frame_ssim;
  std::vector<double> frame_psnr;
};

/// SSIM over luma with an 8x8 uniform sliding window (stride 1),
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2, mean over all window positions.
/// Symmetric in its arguments; 1.0 exactly iff the planes are identical.
double ssim_frame(const Frame& a, const Frame& b);

/// Luma PSNR in dB, 10*log10(255^2 / MSE), capped at 100 dB so identical
/// frames aggregate cleanly.
double psnr_frame(const Frame& a, const Frame& b);

inline constexpr double kPsnrCapDb = 100.0;

/// Spatial information: max over frames of the population standard deviation
/// of the Sobel gradient magnitude, computed over the interior (the 1-pixel
/// border is excluded).
double spatial_info(const FrameSeq& video);

/// Temporal information: max over consecutive frame pairs of the population
/// standard deviation of the luma difference.
double temporal_info(const FrameSeq& video);

/// Frame-by-frame SSIM/PSNR of a reconstruction against its reference.
/// `threads` > 1 scores frames in parallel; aggregation order is fixed, so
/// results are identical for any thread count.
QualityReport video_metrics(const FrameSeq& recon, const FrameSeq& ref, int threads = 1);

/// CSV dump: header `frame_idx,ssim,psnr`.
void write_metrics_csv(const QualityReport& report, const std::string& path);

}  // namespace svcmimo
