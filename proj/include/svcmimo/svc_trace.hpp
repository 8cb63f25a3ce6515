#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace svcmimo {

enum class Layer : int { Base = 0, Enh = 1 };

const char* layer_name(Layer layer);

/// One transport packet of the layered stream.
struct Packet {
  Layer layer = Layer::Base;
  int frame_idx = 0;          ///< 0-based index on that layer's timeline
  std::int64_t length_bits = 0;
};

/// Ordered packet records for a two-layer clip plus the stream geometry.
/// Frame counts are derived from the highest referenced index per layer; a
/// frame may carry several packets (it is lost if any of them is lost).
struct PacketTrace {
  std::vector<Packet> packets;
  int base_fps = 15;
  int enh_fps = 30;
  int base_width = 176;
  int base_height = 144;
  int enh_width = 352;
  int enh_height = 288;
  int n_base_frames = 0;
  int n_enh_frames = 0;

  int fps_ratio() const { return base_fps > 0 ? enh_fps / base_fps : 0; }

  /// Recomputes per-layer frame counts from the packet list.
  void refresh_frame_counts();

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;
};

/// Geometry applied to traces parsed from CSV (the CSV itself carries only
/// packet rows).
struct TraceGeometry {
  int base_fps = 15;
  int enh_fps = 30;
  int base_width = 176;
  int base_height = 144;
  int enh_width = 352;
  int enh_height = 288;
};

/// Parses the trace CSV (header `layer,frame_idx,length_bits`). Malformed
/// rows raise ParseError with the line number; invariant violations raise
/// ValidationError.
PacketTrace load_trace(const std::string& path, const TraceGeometry& geo = {});
PacketTrace parse_trace(std::istream& in, const std::string& name,
                        const TraceGeometry& geo = {});

/// Canonical CSV form: header row, `base`/`enh` layer tags, LF endings.
void save_trace(const PacketTrace& trace, const std::string& path);

/// Synthetic two-layer trace: one packet per frame per layer, lengths drawn
/// from a lognormal with the given arithmetic mean and log-domain dispersion.
/// dispersion = 0 degenerates to the exact mean. Deterministic in `seed`.
PacketTrace synth_trace(int n_frames, std::int64_t base_mean_bits,
                        std::int64_t enh_mean_bits, double dispersion,
                        std::uint64_t seed, const TraceGeometry& geo = {});

struct LayerStats {
  std::int64_t packet_count = 0;
  double mean_bits = 0.0;
  std::int64_t max_bits = 0;
  std::int64_t total_bits = 0;
};

struct TraceStats {
  LayerStats base;
  LayerStats enh;
  /// Set when the base layer's mean packet length exceeds the enhancement
  /// layer's; this regime moves the best power split toward the base layer.
  bool base_mean_exceeds_enh = false;
};

TraceStats trace_stats(const PacketTrace& trace);

}  // namespace svcmimo
