#include "svcmimo/loss_sim.hpp"

#include <algorithm>
#include <array>

#include "svcmimo/errors.hpp"
#include "svcmimo/io_util.hpp"
#include "svcmimo/rng.hpp"

namespace svcmimo {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Full: return "full";
    case Provenance::BaseUpsampled: return "base_upsampled";
    case Provenance::PrevCopy: return "prev_copy";
    default: return "filler";
  }
}

namespace {

void check_split(const PowerSplit& split) {
  split.validate();
  if (split.layer_db.size() != 2)
    throw ValidationError("loss_sim: expected one power per layer (2 layers)");
}

std::array<double, 2> layer_bit_error(const PowerSplit& split, const ChannelConfig& cfg) {
  return {bit_error_prob(split.layer_linear(0), cfg),
          bit_error_prob(split.layer_linear(1), cfg)};
}

}  // namespace

LossOutcome simulate_losses(const PacketTrace& trace, const PowerSplit& split,
                            const ChannelConfig& cfg, std::uint64_t seed) {
  trace.validate();
  check_split(split);
  const auto pb = layer_bit_error(split, cfg);

  LossOutcome outcome;
  std::array<std::int64_t, 2> total{0, 0};
  std::array<std::int64_t, 2> lost{0, 0};
  std::vector<char> base_frame_lost(std::size_t(std::max(trace.n_base_frames, 0)), 0);
  std::vector<char> enh_frame_lost(std::size_t(std::max(trace.n_enh_frames, 0)), 0);

  for (std::size_t i = 0; i < trace.packets.size(); ++i) {
    const Packet& p = trace.packets[i];
    const int layer = static_cast<int>(p.layer);
    const double per = packet_error_rate(pb[layer], p.length_bits);
    total[layer] += 1;
    if (uniform_u01(seed, /*stream=*/0, i) < per) {
      outcome.lost_packets.push_back(i);
      lost[layer] += 1;
      if (p.layer == Layer::Base)
        base_frame_lost[p.frame_idx] = 1;
      else
        enh_frame_lost[p.frame_idx] = 1;
    }
  }
  for (int f = 0; f < trace.n_base_frames; ++f)
    if (base_frame_lost[f]) outcome.lost_base_frames.push_back(f);
  for (int f = 0; f < trace.n_enh_frames; ++f)
    if (enh_frame_lost[f]) outcome.lost_enh_frames.push_back(f);
  outcome.per_base = total[0] > 0 ? double(lost[0]) / double(total[0]) : 0.0;
  outcome.per_enh = total[1] > 0 ? double(lost[1]) / double(total[1]) : 0.0;
  return outcome;
}

LayerPer expected_per(const PacketTrace& trace, const PowerSplit& split,
                      const ChannelConfig& cfg) {
  trace.validate();
  check_split(split);
  const auto pb = layer_bit_error(split, cfg);

  std::array<double, 2> sum{0.0, 0.0};
  std::array<std::int64_t, 2> count{0, 0};
  for (const Packet& p : trace.packets) {
    const int layer = static_cast<int>(p.layer);
    sum[layer] += packet_error_rate(pb[layer], p.length_bits);
    count[layer] += 1;
  }
  if (count[0] == 0) throw ValidationError("expected_per: base layer has no packets");
  if (count[1] == 0) throw ValidationError("expected_per: enh layer has no packets");
  return {sum[0] / double(count[0]), sum[1] / double(count[1])};
}

double expected_total_per(const PacketTrace& trace, const PowerSplit& split,
                          const ChannelConfig& cfg) {
  trace.validate();
  check_split(split);
  const auto pb = layer_bit_error(split, cfg);
  double sum = 0.0;
  for (const Packet& p : trace.packets)
    sum += packet_error_rate(pb[static_cast<int>(p.layer)], p.length_bits);
  return sum / double(trace.packets.size());
}

Reconstruction conceal(const LossOutcome& outcome, const LayeredVideo& video,
                       const PacketTrace& trace) {
  trace.validate();
  video.validate();
  const int ratio = trace.fps_ratio();
  const std::size_t n_base = video.base_frames.size();
  const std::size_t n_out = video.enh_frames.size();
  if (n_out != n_base * std::size_t(ratio))
    throw ValidationError(
        "conceal: enhancement frame count must be base count times the fps ratio");
  if (std::size_t(trace.n_base_frames) > n_base ||
      std::size_t(trace.n_enh_frames) > n_out)
    throw ValidationError("conceal: trace references frames beyond the video");
  if (video.base_frames.front().width != trace.base_width ||
      video.base_frames.front().height != trace.base_height ||
      video.enh_frames.front().width != trace.enh_width ||
      video.enh_frames.front().height != trace.enh_height)
    throw ValidationError("conceal: video dimensions do not match the trace");

  std::vector<char> base_lost(n_base, 0);
  std::vector<char> enh_lost(n_out, 0);
  for (int f : outcome.lost_base_frames) base_lost[f] = 1;
  for (int f : outcome.lost_enh_frames) enh_lost[f] = 1;

  const int enh_w = video.enh_frames.front().width;
  const int enh_h = video.enh_frames.front().height;

  Reconstruction recon;
  recon.frames.reserve(n_out);
  recon.provenance.reserve(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t b = k / std::size_t(ratio);
    if (base_lost[b]) {
      if (k == 0) {
        recon.frames.push_back(Frame::solid(enh_w, enh_h, 128, 128));
        recon.provenance.push_back(Provenance::Filler);
      } else {
        recon.frames.push_back(recon.frames.back());
        recon.provenance.push_back(Provenance::PrevCopy);
      }
    } else if (enh_lost[k]) {
      recon.frames.push_back(resize_bilinear(video.base_frames[b], enh_w, enh_h));
      recon.provenance.push_back(Provenance::BaseUpsampled);
    } else {
      recon.frames.push_back(video.enh_frames[k]);
      recon.provenance.push_back(Provenance::Full);
    }
  }
  return recon;
}

void write_loss_csv(const LossOutcome& outcome, const PacketTrace& trace,
                    const std::string& path) {
  std::vector<char> lost(trace.packets.size(), 0);
  for (std::size_t i : outcome.lost_packets) {
    if (i >= lost.size()) throw ValidationError("write_loss_csv: packet index out of range");
    lost[i] = 1;
  }
  AtomicFile file(path);
  auto& out = file.stream();
  out << "packet_idx,layer,frame_idx,lost\n";
  for (std::size_t i = 0; i < trace.packets.size(); ++i) {
    const Packet& p = trace.packets[i];
    out << i << ',' << layer_name(p.layer) << ',' << p.frame_idx << ',' << int(lost[i])
        << '\n';
  }
  file.commit();
}

}  // namespace svcmimo
