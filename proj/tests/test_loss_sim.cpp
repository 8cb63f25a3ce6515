#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "svcmimo/errors.hpp"
#include "svcmimo/loss_sim.hpp"
#include "svcmimo/quality.hpp"

using namespace svcmimo;

namespace {

const ChannelConfig kDefaultCfg{224, 8, 2, 4};

TraceGeometry toy_geometry() {
  TraceGeometry geo;
  geo.base_width = 8;
  geo.base_height = 8;
  geo.enh_width = 16;
  geo.enh_height = 16;
  return geo;
}

// Four base frames / eight enhancement frames of distinct toy content.
LayeredVideo toy_video() {
  LayeredVideo video;
  for (int j = 0; j < 4; ++j) video.base_frames.push_back(oracle::pattern_frame(8, 8, 40 + j));
  for (int k = 0; k < 8; ++k) video.enh_frames.push_back(oracle::pattern_frame(16, 16, 80 + k));
  video.ref_frames = video.enh_frames;
  return video;
}

PacketTrace toy_trace() {
  return synth_trace(4, 900, 1200, 0.0, 1, toy_geometry());
}

// Homogeneous single-rate trace: both layers share the frame rate, so every
// packet sees the same analytic PER at the equal split.
PacketTrace homogeneous_trace(int n_frames, std::int64_t bits) {
  TraceGeometry geo;
  geo.base_fps = 30;
  geo.enh_fps = 30;
  return synth_trace(n_frames, bits, bits, 0.0, 1, geo);
}

}  // namespace

TEST_CASE("overwhelming power loses nothing; vanishing power loses everything") {
  const PacketTrace trace = homogeneous_trace(5000, 8000);  // 10^4 packets
  REQUIRE(trace.packets.size() == 10000);

  const PowerSplit strong = PowerSplit::from_base_db(33.0, 30.0);
  const LossOutcome none = simulate_losses(trace, strong, kDefaultCfg, 42);
  CHECK(none.lost_packets.empty());
  CHECK(none.per_base == 0.0);
  CHECK(none.per_enh == 0.0);

  // at -3000 dB the erfc argument underflows and Pb reaches 1 for M = 2
  const ChannelConfig bpsk{224, 8, 2, 2};
  const PowerSplit feeble = PowerSplit::from_base_db(5.50, -3000.0);
  CHECK(bit_error_prob(feeble.layer_linear(0), bpsk) == 1.0);
  const LossOutcome base_gone = simulate_losses(trace, feeble, bpsk, 42);
  CHECK(base_gone.per_base == 1.0);
  CHECK(std::size_t(base_gone.lost_base_frames.size()) == 5000);
}

TEST_CASE("empirical loss fraction concentrates on the analytic PER") {
  const PacketTrace trace = homogeneous_trace(5000, 25000);
  const PowerSplit split = PowerSplit::equal(5.50);
  const double analytic = expected_total_per(trace, split, kDefaultCfg);
  CHECK(analytic == doctest::Approx(0.0194).epsilon(0.05));

  const double n = double(trace.packets.size());
  const double sigma = std::sqrt(analytic * (1.0 - analytic) / n);
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const LossOutcome outcome = simulate_losses(trace, split, kDefaultCfg, seed);
    const double empirical = double(outcome.lost_packets.size()) / n;
    CHECK(std::abs(empirical - analytic) <= 4.0 * sigma);
  }
}

TEST_CASE("losses are deterministic and draws are per-packet counter-based") {
  const PacketTrace trace = homogeneous_trace(500, 20000);
  const PowerSplit split = PowerSplit::equal(5.50);
  const LossOutcome a = simulate_losses(trace, split, kDefaultCfg, 9);
  const LossOutcome b = simulate_losses(trace, split, kDefaultCfg, 9);
  CHECK(a.lost_packets == b.lost_packets);
  CHECK(a.lost_base_frames == b.lost_base_frames);

  const LossOutcome c = simulate_losses(trace, split, kDefaultCfg, 10);
  CHECK(a.lost_packets != c.lost_packets);

  // appending packets must not disturb the draws of existing packet indices
  PacketTrace extended = trace;
  for (int f = 0; f < 100; ++f) extended.packets.push_back({Layer::Enh, f, 20000});
  extended.refresh_frame_counts();
  const LossOutcome d = simulate_losses(extended, split, kDefaultCfg, 9);
  std::vector<std::size_t> d_prefix;
  for (std::size_t i : d.lost_packets)
    if (i < trace.packets.size()) d_prefix.push_back(i);
  CHECK(d_prefix == a.lost_packets);
}

TEST_CASE("a frame is lost iff at least one of its packets is lost") {
  PacketTrace trace;
  TraceGeometry geo = toy_geometry();
  trace.base_fps = geo.base_fps;
  trace.enh_fps = geo.enh_fps;
  trace.base_width = geo.base_width;
  trace.base_height = geo.base_height;
  trace.enh_width = geo.enh_width;
  trace.enh_height = geo.enh_height;
  for (int f = 0; f < 100; ++f) {
    trace.packets.push_back({Layer::Base, f, 40000});
    trace.packets.push_back({Layer::Base, f, 60000});
    trace.packets.push_back({Layer::Enh, 2 * f, 50000});
    trace.packets.push_back({Layer::Enh, 2 * f + 1, 50000});
  }
  trace.refresh_frame_counts();
  const PowerSplit split = PowerSplit::equal(4.0);  // lossy regime
  const LossOutcome outcome = simulate_losses(trace, split, kDefaultCfg, 3);
  CHECK(!outcome.lost_packets.empty());

  std::vector<char> base_expect(100, 0), enh_expect(200, 0);
  for (std::size_t i : outcome.lost_packets) {
    const Packet& p = trace.packets[i];
    (p.layer == Layer::Base ? base_expect[p.frame_idx] : enh_expect[p.frame_idx]) = 1;
  }
  std::vector<char> base_actual(100, 0), enh_actual(200, 0);
  for (int f : outcome.lost_base_frames) base_actual[f] = 1;
  for (int f : outcome.lost_enh_frames) enh_actual[f] = 1;
  CHECK(base_actual == base_expect);
  CHECK(enh_actual == enh_expect);

  std::int64_t lost_base = 0;
  for (std::size_t i : outcome.lost_packets)
    if (trace.packets[i].layer == Layer::Base) ++lost_base;
  CHECK(outcome.per_base == double(lost_base) / 200.0);
}

TEST_CASE("expected_per: homogeneous closed form, mixed lengths, empty layer") {
  const PowerSplit split = PowerSplit::equal(5.50);
  const PacketTrace homogeneous = homogeneous_trace(50, 12000);
  const double pb = bit_error_prob(split.layer_linear(0), kDefaultCfg);
  const LayerPer per = expected_per(homogeneous, split, kDefaultCfg);
  CHECK(per.base == doctest::Approx(packet_error_rate(pb, 12000)).epsilon(1e-14));
  CHECK(per.enh == doctest::Approx(packet_error_rate(pb, 12000)).epsilon(1e-14));

  // mean of the two closed forms; the frozen value pins the 1e-5 reference
  CHECK((packet_error_rate(1e-5, 1000) + packet_error_rate(1e-5, 2000)) / 2.0 ==
        doctest::Approx(0.014875820233706507).epsilon(1e-12));
  PacketTrace mixed;
  mixed.packets = {{Layer::Base, 0, 1000}, {Layer::Base, 1, 2000}, {Layer::Enh, 0, 1500}};
  mixed.refresh_frame_counts();
  const LayerPer mixed_per = expected_per(mixed, split, kDefaultCfg);
  CHECK(mixed_per.base ==
        doctest::Approx((packet_error_rate(pb, 1000) + packet_error_rate(pb, 2000)) / 2.0)
            .epsilon(1e-15));

  PacketTrace base_only;
  base_only.packets = {{Layer::Base, 0, 1000}};
  base_only.refresh_frame_counts();
  CHECK_THROWS_WITH_AS(expected_per(base_only, split, kDefaultCfg),
                       "expected_per: enh layer has no packets", ValidationError);
}

TEST_CASE("analytic PER is monotone in the layer's own power") {
  PacketTrace trace = homogeneous_trace(20, 15000);
  double prev = 1.0;
  for (double p1 = 0.5; p1 <= 3.5; p1 += 0.25) {
    PowerSplit split;
    split.layer_db = {p1, 2.0};
    split.total_db = linear_to_db(db_to_linear(p1) + db_to_linear(2.0));
    const LayerPer per = expected_per(trace, split, kDefaultCfg);
    CHECK(per.base <= prev);
    prev = per.base;
  }
}

TEST_CASE("conceal: lossless pass-through") {
  const LayeredVideo video = toy_video();
  const PacketTrace trace = toy_trace();
  const Reconstruction recon = conceal(LossOutcome{}, video, trace);
  REQUIRE(recon.frames.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(recon.provenance[k] == Provenance::Full);
    CHECK(recon.frames[k].y == video.enh_frames[k].y);
  }
}

TEST_CASE("conceal: total base loss yields gray filler and copies") {
  const LayeredVideo video = toy_video();
  const PacketTrace trace = toy_trace();
  LossOutcome outcome;
  outcome.lost_base_frames = {0, 1, 2, 3};
  const Reconstruction recon = conceal(outcome, video, trace);
  CHECK(recon.provenance[0] == Provenance::Filler);
  for (std::size_t k = 1; k < 8; ++k) CHECK(recon.provenance[k] == Provenance::PrevCopy);
  for (const Frame& f : recon.frames)
    for (std::uint8_t v : f.y) CHECK(v == 128);
}

TEST_CASE("conceal: an enhancement-only loss upsamples the base frame") {
  const LayeredVideo video = toy_video();
  const PacketTrace trace = toy_trace();
  LossOutcome outcome;
  outcome.lost_enh_frames = {3};  // fps ratio 2 -> base frame 1
  const Reconstruction recon = conceal(outcome, video, trace);
  CHECK(recon.provenance[3] == Provenance::BaseUpsampled);
  const auto expected_y = oracle::bilinear_plane(video.base_frames[1].y, 8, 8, 16, 16);
  const auto expected_cb = oracle::bilinear_plane(video.base_frames[1].cb, 4, 4, 8, 8);
  CHECK(recon.frames[3].y == expected_y);
  CHECK(recon.frames[3].cb == expected_cb);
  for (std::size_t k = 0; k < 8; ++k)
    if (k != 3) CHECK(recon.provenance[k] == Provenance::Full);
}

TEST_CASE("conceal: base loss wins over enhancement loss and copies forward") {
  const LayeredVideo video = toy_video();
  const PacketTrace trace = toy_trace();
  LossOutcome outcome;
  outcome.lost_base_frames = {1};
  outcome.lost_enh_frames = {2};  // same epoch: base rule applies
  const Reconstruction recon = conceal(outcome, video, trace);
  CHECK(recon.provenance[2] == Provenance::PrevCopy);
  CHECK(recon.provenance[3] == Provenance::PrevCopy);
  CHECK(recon.frames[2].y == video.enh_frames[1].y);
  CHECK(recon.frames[3].y == video.enh_frames[1].y);
}

TEST_CASE("conceal never reads future frames") {
  const PacketTrace trace = toy_trace();
  LayeredVideo video = toy_video();
  LossOutcome outcome;
  outcome.lost_base_frames = {1};
  outcome.lost_enh_frames = {5};
  const Reconstruction full = conceal(outcome, video, trace);

  const std::size_t k = 4;  // zero everything first used after output k
  LayeredVideo truncated = video;
  for (std::size_t i = k + 1; i < truncated.enh_frames.size(); ++i) {
    truncated.enh_frames[i] = Frame::solid(16, 16, 0);
    truncated.ref_frames[i] = truncated.enh_frames[i];
  }
  for (std::size_t j = 0; j < truncated.base_frames.size(); ++j)
    if (2 * j > k) truncated.base_frames[j] = Frame::solid(8, 8, 0);
  const Reconstruction cut = conceal(outcome, truncated, trace);
  for (std::size_t i = 0; i <= k; ++i) {
    CHECK(cut.provenance[i] == full.provenance[i]);
    CHECK(cut.frames[i].y == full.frames[i].y);
  }
}

TEST_CASE("conceal validates video/trace consistency") {
  const LayeredVideo video = toy_video();
  PacketTrace trace = toy_trace();
  trace.enh_width = 32;  // video no longer matches
  CHECK_THROWS_AS(conceal(LossOutcome{}, video, trace), ValidationError);

  LayeredVideo short_video = toy_video();
  short_video.base_frames.pop_back();
  CHECK_THROWS_AS(conceal(LossOutcome{}, short_video, toy_trace()), ValidationError);
}
