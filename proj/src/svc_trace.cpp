#include "svcmimo/svc_trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "svcmimo/errors.hpp"
#include "svcmimo/io_util.hpp"
#include "svcmimo/rng.hpp"

namespace svcmimo {

const char* layer_name(Layer layer) { return layer == Layer::Base ? "base" : "enh"; }

void PacketTrace::refresh_frame_counts() {
  int max_base = -1, max_enh = -1;
  for (const Packet& p : packets) {
    if (p.layer == Layer::Base)
      max_base = std::max(max_base, p.frame_idx);
    else
      max_enh = std::max(max_enh, p.frame_idx);
  }
  n_base_frames = max_base + 1;
  n_enh_frames = max_enh + 1;
}

void PacketTrace::validate() const {
  if (packets.empty()) throw ValidationError("empty trace");
  if (base_fps < 1 || enh_fps < 1)
    throw ValidationError("trace: frame rates must be >= 1");
  if (enh_fps % base_fps != 0)
    throw ValidationError("trace: enh_fps must be an integer multiple of base_fps");
  if (base_width < 2 || base_height < 2 || base_width % 2 != 0 || base_height % 2 != 0 ||
      enh_width % 2 != 0 || enh_height % 2 != 0)
    throw ValidationError("trace: layer dimensions must be even and >= 2");
  if (base_width > enh_width || base_height > enh_height)
    throw ValidationError(
        "trace: base layer dimensions must not exceed enhancement layer dimensions");
  int max_base = -1, max_enh = -1;
  for (const Packet& p : packets) {
    if (p.length_bits < 1) throw ValidationError("trace: packet length_bits must be >= 1");
    if (p.frame_idx < 0) throw ValidationError("trace: packet frame_idx must be >= 0");
    int& m = p.layer == Layer::Base ? max_base : max_enh;
    m = std::max(m, p.frame_idx);
  }
  if (max_base + 1 != n_base_frames || max_enh + 1 != n_enh_frames)
    throw ValidationError("trace: frame counts do not match the referenced frame indices");
}

namespace {

std::int64_t parse_int_field(const std::string& field, const std::string& name, int line,
                             const char* what) {
  std::int64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(name, line, std::string("expected an integer ") + what + ", got '" +
                                     field + "'");
  return value;
}

}  // namespace

PacketTrace parse_trace(std::istream& in, const std::string& name, const TraceGeometry& geo) {
  PacketTrace trace;
  trace.base_fps = geo.base_fps;
  trace.enh_fps = geo.enh_fps;
  trace.base_width = geo.base_width;
  trace.base_height = geo.base_height;
  trace.enh_width = geo.enh_width;
  trace.enh_height = geo.enh_height;

  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "layer,frame_idx,length_bits")
        throw ParseError(name, line_no,
                         "expected header 'layer,frame_idx,length_bits', got '" + line + "'");
      saw_header = true;
      continue;
    }
    std::string fields[3];
    int n_fields = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (n_fields == 3) throw ParseError(name, line_no, "expected 3 fields");
        fields[n_fields++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (n_fields != 3) throw ParseError(name, line_no, "expected 3 fields");

    Packet p;
    if (fields[0] == "base")
      p.layer = Layer::Base;
    else if (fields[0] == "enh")
      p.layer = Layer::Enh;
    else
      throw ParseError(name, line_no, "layer must be 'base' or 'enh', got '" + fields[0] + "'");
    p.frame_idx = static_cast<int>(parse_int_field(fields[1], name, line_no, "frame_idx"));
    p.length_bits = parse_int_field(fields[2], name, line_no, "length_bits");
    trace.packets.push_back(p);
  }
  trace.refresh_frame_counts();
  trace.validate();
  return trace;
}

PacketTrace load_trace(const std::string& path, const TraceGeometry& geo) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open trace file: " + path);
  return parse_trace(in, path, geo);
}

void save_trace(const PacketTrace& trace, const std::string& path) {
  trace.validate();
  AtomicFile file(path);
  auto& out = file.stream();
  out << "layer,frame_idx,length_bits\n";
  for (const Packet& p : trace.packets)
    out << layer_name(p.layer) << ',' << p.frame_idx << ',' << p.length_bits << '\n';
  file.commit();
}

namespace {

std::int64_t lognormal_bits(std::int64_t mean_bits, double dispersion, std::uint64_t seed,
                            std::uint64_t stream, std::uint64_t index) {
  if (dispersion == 0.0) return mean_bits;
  // mu chosen so the arithmetic mean of the lognormal equals mean_bits.
  const double mu = std::log(double(mean_bits)) - 0.5 * dispersion * dispersion;
  const double z = normal_01(seed, stream, index);
  const double bits = std::exp(mu + dispersion * z);
  return std::max<std::int64_t>(1, std::llround(bits));
}

}  // namespace

PacketTrace synth_trace(int n_frames, std::int64_t base_mean_bits, std::int64_t enh_mean_bits,
                        double dispersion, std::uint64_t seed, const TraceGeometry& geo) {
  if (n_frames < 1) throw std::invalid_argument("synth_trace: n_frames must be >= 1");
  if (base_mean_bits < 1 || enh_mean_bits < 1)
    throw std::invalid_argument("synth_trace: mean packet lengths must be >= 1");
  if (!(dispersion >= 0.0))
    throw std::invalid_argument("synth_trace: dispersion must be >= 0");

  PacketTrace trace;
  trace.base_fps = geo.base_fps;
  trace.enh_fps = geo.enh_fps;
  trace.base_width = geo.base_width;
  trace.base_height = geo.base_height;
  trace.enh_width = geo.enh_width;
  trace.enh_height = geo.enh_height;
  const int ratio = trace.fps_ratio();
  if (ratio < 1 || geo.enh_fps % geo.base_fps != 0)
    throw std::invalid_argument("synth_trace: enh_fps must be a multiple of base_fps");

  for (int f = 0; f < n_frames; ++f)
    trace.packets.push_back({Layer::Base, f, lognormal_bits(base_mean_bits, dispersion, seed,
                                                            /*stream=*/0, f)});
  for (int f = 0; f < n_frames * ratio; ++f)
    trace.packets.push_back({Layer::Enh, f, lognormal_bits(enh_mean_bits, dispersion, seed,
                                                           /*stream=*/1, f)});
  trace.refresh_frame_counts();
  trace.validate();
  return trace;
}

TraceStats trace_stats(const PacketTrace& trace) {
  trace.validate();
  TraceStats stats;
  for (const Packet& p : trace.packets) {
    LayerStats& ls = p.layer == Layer::Base ? stats.base : stats.enh;
    ls.packet_count += 1;
    ls.total_bits += p.length_bits;
    ls.max_bits = std::max(ls.max_bits, p.length_bits);
  }
  if (stats.base.packet_count > 0)
    stats.base.mean_bits = double(stats.base.total_bits) / double(stats.base.packet_count);
  if (stats.enh.packet_count > 0)
    stats.enh.mean_bits = double(stats.enh.total_bits) / double(stats.enh.packet_count);
  stats.base_mean_exceeds_enh = stats.base.mean_bits > stats.enh.mean_bits;
  return stats;
}

}  // namespace svcmimo
