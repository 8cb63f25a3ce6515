#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svcmimo/frame.hpp"
#include "svcmimo/link_model.hpp"
#include "svcmimo/svc_trace.hpp"

namespace svcmimo {

/// Result of one Monte-Carlo transmission of a trace.
struct LossOutcome {
  std::vector<std::size_t> lost_packets;  ///< ascending indices into trace.packets
  std::vector<int> lost_base_frames;      ///< ascending, deduplicated
  std::vector<int> lost_enh_frames;
  double per_base = 0.0;  ///< realized packet-loss fraction, base layer
  double per_enh = 0.0;
};

enum class Provenance : std::uint8_t { Full, BaseUpsampled, PrevCopy, Filler };

const char* provenance_name(Provenance p);

/// Error-concealed output on the enhancement timeline.
struct Reconstruction {
  FrameSeq frames;
  std::vector<Provenance> provenance;
};

/// Draws each packet independently with probability
/// packet_error_rate(bit_error_prob(layer power), packet length). Every
/// packet uses its own counter-based substream keyed by (seed, packet index),
/// so the outcome is reproducible and independent of evaluation order.
LossOutcome simulate_losses(const PacketTrace& trace, const PowerSplit& split,
                            const ChannelConfig& cfg, std::uint64_t seed);

/// Analytic per-layer packet error rate: the mean over a layer's packets of
/// 1-(1-Pb)^L. Throws ValidationError when a layer has no packets.
struct LayerPer {
  double base = 0.0;
  double enh = 0.0;
};
LayerPer expected_per(const PacketTrace& trace, const PowerSplit& split,
                      const ChannelConfig& cfg);

/// Mean packet error rate over all packets in the trace (both layers at
/// their own powers); the calibration anchor.
double expected_total_per(const PacketTrace& trace, const PowerSplit& split,
                          const ChannelConfig& cfg);

/// Decoder-side repair, sequential by construction (PrevCopy reads the
/// previous output frame):
///   - both layers intact    -> enhancement frame (Full)
///   - enhancement lost only -> base frame, bilinearly upsampled (BaseUpsampled)
///   - base lost             -> previous output frame (PrevCopy),
///                              mid-gray filler when there is none (Filler)
/// A base frame covers fps_ratio output frames.
Reconstruction conceal(const LossOutcome& outcome, const LayeredVideo& video,
                       const PacketTrace& trace);

/// Audit dump: one row per packet, `packet_idx,layer,frame_idx,lost`.
void write_loss_csv(const LossOutcome& outcome, const PacketTrace& trace,
                    const std::string& path);

}  // namespace svcmimo
