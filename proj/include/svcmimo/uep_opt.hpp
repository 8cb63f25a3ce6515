#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svcmimo/frame.hpp"
#include "svcmimo/link_model.hpp"
#include "svcmimo/loss_sim.hpp"
#include "svcmimo/svc_trace.hpp"

namespace svcmimo {

/// Grid definition for the power-allocation sweep. The base-layer power runs
/// over [p1_min_db, p1_max_db]; the enhancement layer always receives the
/// linear-domain remainder of the budget.
struct SweepConfig {
  double total_db = 5.50;
  double p1_min_db = 1.05;
  double p1_max_db = 3.58;
  double step_db = 0.05;
  int n_trials = 200;
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 = hardware concurrency

  void validate() const;
};

struct SweepPoint {
  double p1_db = 0.0;
  double p2_db = 0.0;
  double per_base = 0.0;  ///< analytic, mean over base packets
  double per_enh = 0.0;
  double mean_ssim = 0.0;       ///< across-trial mean of per-clip mean SSIM
  double ci_halfwidth = 0.0;    ///< 1.96 * stderr across trials
  std::int64_t lost_base = 0;   ///< realized packet losses, summed over trials
  std::int64_t lost_enh = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::size_t best = 0;         ///< index of the maximum mean SSIM
  std::size_t equal_split = 0;  ///< grid index nearest the equal linear split
  double equal_split_db = 0.0;
};

/// Monte-Carlo sweep over base-layer powers: each grid point runs n_trials
/// independent loss simulations, conceals, and scores mean SSIM against the
/// reference. Deterministic in (seed); identical for any thread count.
SweepResult sweep(const PacketTrace& trace, const LayeredVideo& video,
                  const ChannelConfig& cfg, const SweepConfig& sc);

/// CSV dump: header `p1_db,p2_db,per_base,per_enh,mean_ssim,ci`.
void write_sweep_csv(const SweepResult& result, const std::string& path);

/// Quadratic-in-power content-aware quality model:
///   ssim = a*p1^2 + b*p1 + c*si + d*ti + e.
struct RegressionModel {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
};

struct RegressionSample {
  double p1 = 0.0;
  double si = 0.0;
  double ti = 0.0;
  double ssim = 0.0;
};

/// Ordinary least squares on features (p1^2, p1, si, ti, 1). Throws
/// ValidationError naming the collinear feature columns when the design is
/// rank deficient; requires at least 5 samples.
RegressionModel fit_regression(const std::vector<RegressionSample>& samples);

struct Prediction {
  double value = 0.0;  ///< clamped to [-1, 1]
  double raw = 0.0;
  bool clamped = false;
};

Prediction predict(const RegressionModel& model, double p1, double si, double ti);

/// Sample Pearson correlation. Throws std::domain_error on zero variance or
/// fewer than two points.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

/// Plain-text key-value model file with the five coefficients plus optional
/// fit metadata.
void save_model(const RegressionModel& model, const std::string& path,
                std::size_t n_samples = 0, double train_pearson = 0.0);
RegressionModel load_model(const std::string& path);

/// One calibration candidate outcome.
struct CandidateScore {
  ChannelConfig config;
  double total_per = 0.0;
};

struct CalibrationResult {
  ChannelConfig config;
  double achieved_per = 0.0;
  std::string note;
  std::vector<CandidateScore> ranked;  ///< all candidates, closest first
};

/// The documented default search space: n_rx fixed at 2 (one layer per
/// receive antenna), n_tx over common massive-MIMO panel sizes, a few user
/// loads, and the supported modulation orders.
std::vector<ChannelConfig> default_candidate_set();

/// Picks the candidate whose analytic total PER at the equal linear split of
/// `total_db` is closest to target_per. Throws CalibrationError (listing the
/// closest candidates) when none lands within +/-25% relative.
CalibrationResult calibrate(const PacketTrace& trace,
                            const std::vector<ChannelConfig>& candidates,
                            double target_per, double total_db = 5.50);

}  // namespace svcmimo
