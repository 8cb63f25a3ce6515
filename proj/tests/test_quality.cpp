#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "svcmimo/errors.hpp"
#include "svcmimo/quality.hpp"
#include "svcmimo/rng.hpp"

using namespace svcmimo;

namespace {

Frame noisy_copy(const Frame& src, int amplitude, std::uint64_t seed) {
  Frame out = src;
  for (std::size_t i = 0; i < out.y.size(); ++i) {
    const double u = uniform_u01(seed, 9, i);
    const int delta = int(std::lround((2.0 * u - 1.0) * amplitude));
    out.y[i] = std::uint8_t(std::clamp(int(out.y[i]) + delta, 0, 255));
  }
  return out;
}

}  // namespace

TEST_CASE("ssim identity, symmetry, range") {
  const Frame a = oracle::pattern_frame(32, 24, 1);
  const Frame b = oracle::pattern_frame(32, 24, 2);
  CHECK(ssim_frame(a, a) == 1.0);
  CHECK(ssim_frame(a, b) == ssim_frame(b, a));
  CHECK(ssim_frame(a, b) >= -1.0);
  CHECK(ssim_frame(a, b) <= 1.0);
  CHECK(ssim_frame(a, b) < 1.0);

  Frame c = a;
  c.y[5 * 32 + 7] = std::uint8_t(c.y[5 * 32 + 7] ^ 0x40);
  CHECK(ssim_frame(a, c) < 1.0);
}

TEST_CASE("ssim on constant frames matches the single-window closed form") {
  const Frame a = Frame::solid(16, 16, 128);
  const Frame b = Frame::solid(16, 16, 129);
  // every 8x8 window is identical: variances and covariance vanish
  const double c1 = 6.5025, c2 = 58.5225;
  const double expected =
      ((2.0 * 128 * 129 + c1) * c2) / ((128.0 * 128 + 129.0 * 129 + c1) * (0.0 + 0.0 + c2));
  CHECK(ssim_frame(a, b) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(ssim_frame(a, b) == doctest::Approx(0.9999697258700236).epsilon(1e-12));
}

TEST_CASE("ssim validation") {
  const Frame a = Frame::solid(16, 16, 100);
  const Frame b = Frame::solid(18, 16, 100);
  CHECK_THROWS_AS(ssim_frame(a, b), ValidationError);
  const Frame tiny = Frame::solid(6, 6, 100);
  CHECK_THROWS_AS(ssim_frame(tiny, tiny), ValidationError);
}

TEST_CASE("psnr identities and goldens") {
  const Frame a = Frame::solid(16, 16, 77);
  CHECK(psnr_frame(a, a) == kPsnrCapDb);

  const Frame black = Frame::solid(16, 16, 0);
  const Frame white = Frame::solid(16, 16, 255);
  CHECK(psnr_frame(black, white) == doctest::Approx(0.0).epsilon(1e-12));

  Frame c = a;
  c.y[3 * 16 + 4] = std::uint8_t(c.y[3 * 16 + 4] + 16);  // MSE = 256/256 = 1
  CHECK(psnr_frame(a, c) == doctest::Approx(48.130803608679103).epsilon(1e-12));

  const Frame wrong = Frame::solid(14, 16, 77);
  CHECK_THROWS_AS(psnr_frame(a, wrong), ValidationError);
}

TEST_CASE("spatial_info on constants, edges, and permutations") {
  const FrameSeq flat = {Frame::solid(16, 16, 90), Frame::solid(16, 16, 180)};
  CHECK(spatial_info(flat) == 0.0);

  // vertical step edge, checked against a direct Sobel convolution
  Frame edge = Frame::solid(8, 8, 0);
  for (int r = 0; r < 8; ++r)
    for (int c = 4; c < 8; ++c) edge.y[r * 8 + c] = 200;
  const double expected = oracle::pop_std(oracle::sobel_magnitudes(edge.y, 8, 8));
  CHECK(expected > 0.0);
  CHECK(spatial_info({edge}) == doctest::Approx(expected).epsilon(1e-12));

  const Frame tex1 = oracle::pattern_frame(16, 16, 5);
  const Frame tex2 = oracle::pattern_frame(16, 16, 6);
  CHECK(spatial_info({tex1, tex2}) == spatial_info({tex2, tex1}));

  CHECK_THROWS_AS(spatial_info({}), ValidationError);
}

TEST_CASE("spatial_info scales linearly with luma amplitude") {
  Frame small = Frame::solid(12, 12, 0);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) small.y[r * 12 + c] = std::uint8_t((r * 7 + c * 13) % 60);
  Frame doubled = small;
  for (auto& v : doubled.y) v = std::uint8_t(v * 2);
  CHECK(spatial_info({doubled}) == doctest::Approx(2.0 * spatial_info({small})).epsilon(1e-12));
}

TEST_CASE("temporal_info on static, uniform-shift, and moving-pixel clips") {
  const Frame still = oracle::pattern_frame(16, 16, 3);
  CHECK(temporal_info({still, still, still}) == 0.0);

  // constant difference frame has zero deviation
  const FrameSeq alternating = {Frame::solid(16, 16, 100), Frame::solid(16, 16, 110),
                                Frame::solid(16, 16, 100)};
  CHECK(temporal_info(alternating) == 0.0);

  FrameSeq moving;
  for (int t = 0; t < 3; ++t) {
    Frame f = Frame::solid(16, 16, 0);
    f.y[5 * 16 + (3 + t)] = 200;
    moving.push_back(f);
  }
  std::vector<double> diff(16 * 16, 0.0);
  diff[5 * 16 + 3] = -200.0;
  diff[5 * 16 + 4] = 200.0;
  CHECK(temporal_info(moving) == doctest::Approx(oracle::pop_std(diff)).epsilon(1e-12));

  CHECK_THROWS_AS(temporal_info({still}), ValidationError);
}

TEST_CASE("noise ladders degrade ssim and psnr together") {
  const Frame ref = oracle::pattern_frame(48, 48, 11);
  double prev_ssim = 1.1, prev_psnr = 1e9;
  for (int amplitude : {2, 5, 10, 20, 40}) {
    const Frame noisy = noisy_copy(ref, amplitude, 77);
    const double s = ssim_frame(ref, noisy);
    const double p = psnr_frame(ref, noisy);
    CHECK(s < prev_ssim);
    CHECK(p < prev_psnr);  // identical ordering = rank correlation 1.0
    prev_ssim = s;
    prev_psnr = p;
  }
}

TEST_CASE("video_metrics aggregates per-frame scores identically for any thread count") {
  FrameSeq recon, ref;
  for (int i = 0; i < 9; ++i) {
    ref.push_back(oracle::pattern_frame(32, 32, 100 + i));
    recon.push_back(noisy_copy(ref.back(), 6, 13 + i));
  }
  const QualityReport serial = video_metrics(recon, ref, 1);
  const QualityReport parallel = video_metrics(recon, ref, 4);
  REQUIRE(serial.frame_ssim.size() == 9);
  CHECK(serial.mean_ssim == parallel.mean_ssim);
  CHECK(serial.mean_psnr == parallel.mean_psnr);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(serial.frame_ssim[i] == parallel.frame_ssim[i]);
    CHECK(serial.frame_psnr[i] == parallel.frame_psnr[i]);
  }

  const QualityReport self = video_metrics(ref, ref, 2);
  CHECK(self.mean_ssim == 1.0);
  CHECK(self.mean_psnr == kPsnrCapDb);

  CHECK_THROWS_AS(video_metrics(recon, FrameSeq{ref.front()}, 1), ValidationError);
}
