#pragma once

#include <cstdint>
#include <vector>

namespace svcmimo {

/// Massive-MIMO downlink dimensions and modulation. Zero-forcing precoding
/// is assumed throughout; the massive regime requires n_tx > n_users * n_rx.
struct ChannelConfig {
  int n_tx = 224;     ///< base-station antennas
  int n_users = 8;    ///< served users
  int n_rx = 2;       ///< receive antennas per user (= SVC layers here)
  int mod_order = 4;  ///< constellation size, one of {2, 4, 16, 64}

  int excess_antennas() const { return n_tx - n_users * n_rx; }

  /// Throws std::invalid_argument on bad counts/modulation and
  /// std::domain_error outside the massive-MIMO regime.
  void validate() const;
};

/// A per-user power budget split across the per-layer streams. Values are
/// stored in dB; the budget constraint lives in the linear domain, where the
/// per-layer powers must sum to the total within 1e-9 relative.
struct PowerSplit {
  double total_db = 5.50;
  std::vector<double> layer_db;  // index 0 = base layer, 1 = enhancement

  /// Base layer gets `base_db`; the enhancement layer gets the linear-domain
  /// remainder of the budget.
  static PowerSplit from_base_db(double total_db, double base_db);

  /// Even linear-domain split of the budget across `n_layers` streams.
  static PowerSplit equal(double total_db, int n_layers = 2);

  double layer_linear(std::size_t layer) const;
  void validate() const;
};

double db_to_linear(double p_db);
double linear_to_db(double p_lin);

/// Received per-stream SNR under ZF precoding with large antenna excess:
/// p_lin * (n_tx - n_users*n_rx).
double stream_snr(double p_lin, const ChannelConfig& cfg);

/// Bit error probability for one stream:
///   erfc( sqrt( p_lin * (n_tx - K*n_rx) / (K*n_rx) ) * sin(pi/M) ) / log2(M).
/// Strictly decreasing in p_lin and in n_tx; equals 1/log2(M) at p_lin = 0.
/// Note the erfc argument carries an extra 1/(K*n_rx) factor relative to
/// stream_snr; the two expressions are deliberately kept independent.
double bit_error_prob(double p_lin, const ChannelConfig& cfg);

/// Packet error rate for a packet of length_bits i.i.d. bits:
/// 1 - (1 - pb)^L, evaluated via log1p/expm1 so tiny pb with huge L stays
/// accurate.
double packet_error_rate(double pb, std::int64_t length_bits);

}  // namespace svcmimo
