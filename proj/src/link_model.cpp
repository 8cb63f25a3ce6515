#include "svcmimo/link_model.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace svcmimo {

namespace {

bool supported_mod_order(int m) { return m == 2 || m == 4 || m == 16 || m == 64; }

int bits_per_symbol(int mod_order) {
  return std::countr_zero(static_cast<unsigned>(mod_order));
}

}  // namespace

void ChannelConfig::validate() const {
  if (n_tx < 1 || n_users < 1 || n_rx < 1)
    throw std::invalid_argument("ChannelConfig: antenna and user counts must be >= 1");
  if (!supported_mod_order(mod_order))
    throw std::invalid_argument("ChannelConfig: mod_order must be one of 2, 4, 16, 64");
  if (n_tx <= n_users * n_rx)
    throw std::domain_error(
        "ChannelConfig: n_tx must exceed n_users*n_rx (massive-MIMO regime)");
}

double db_to_linear(double p_db) {
  if (!std::isfinite(p_db)) throw std::invalid_argument("db_to_linear: non-finite input");
  return std::pow(10.0, p_db / 10.0);
}

double linear_to_db(double p_lin) {
  if (!std::isfinite(p_lin) || p_lin <= 0.0)
    throw std::invalid_argument("linear_to_db: input must be finite and > 0");
  return 10.0 * std::log10(p_lin);
}

PowerSplit PowerSplit::from_base_db(double total_db, double base_db) {
  const double total_lin = db_to_linear(total_db);
  const double base_lin = db_to_linear(base_db);
  if (base_lin >= total_lin)
    throw std::invalid_argument("PowerSplit: base power must stay below the total budget");
  PowerSplit split;
  split.total_db = total_db;
  split.layer_db = {base_db, linear_to_db(total_lin - base_lin)};
  return split;
}

PowerSplit PowerSplit::equal(double total_db, int n_layers) {
  if (n_layers < 1) throw std::invalid_argument("PowerSplit: need at least one layer");
  const double per_layer = db_to_linear(total_db) / n_layers;
  PowerSplit split;
  split.total_db = total_db;
  split.layer_db.assign(static_cast<std::size_t>(n_layers), linear_to_db(per_layer));
  return split;
}

double PowerSplit::layer_linear(std::size_t layer) const {
  if (layer >= layer_db.size())
    throw std::invalid_argument("PowerSplit: layer index out of range");
  return db_to_linear(layer_db[layer]);
}

void PowerSplit::validate() const {
  if (layer_db.empty()) throw std::invalid_argument("PowerSplit: no layer powers");
  const double total_lin = db_to_linear(total_db);
  double sum = 0.0;
  for (double db : layer_db) sum += db_to_linear(db);  // throws on non-finite entries
  if (std::abs(sum - total_lin) > 1e-9 * total_lin)
    throw std::invalid_argument(
        "PowerSplit: layer powers must sum to the total budget (linear domain), got " +
        std::to_string(sum) + " vs " + std::to_string(total_lin));
}

double stream_snr(double p_lin, const ChannelConfig& cfg) {
  cfg.validate();
  if (!(p_lin > 0.0) || !std::isfinite(p_lin))
    throw std::invalid_argument("stream_snr: power must be finite and > 0");
  return p_lin * cfg.excess_antennas();
}

double bit_error_prob(double p_lin, const ChannelConfig& cfg) {
  cfg.validate();
  if (!(p_lin >= 0.0) || !std::isfinite(p_lin))
    throw std::invalid_argument("bit_error_prob: power must be finite and >= 0");
  const double loading = static_cast<double>(cfg.n_users) * cfg.n_rx;
  const double arg = std::sqrt(p_lin * cfg.excess_antennas() / loading) *
                     std::sin(std::numbers::pi / cfg.mod_order);
  return std::erfc(arg) / bits_per_symbol(cfg.mod_order);
}

double packet_error_rate(double pb, std::int64_t length_bits) {
  if (length_bits < 1)
    throw std::invalid_argument("packet_error_rate: length_bits must be >= 1");
  if (!(pb >= 0.0 && pb <= 1.0))
    throw std::invalid_argument("packet_error_rate: pb must be in [0, 1]");
  if (pb == 0.0) return 0.0;
  if (pb == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(length_bits) * std::log1p(-pb));
}

}  // namespace svcmimo
