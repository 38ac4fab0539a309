#include "urllc/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "urllc/rng.hpp"

namespace urllc::channel {

namespace {

void require(bool cond, const std::string& msg)
{
    if (!cond) throw std::invalid_argument(msg);
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void RadioConfig::validate() const
{
    require(noise_power_w > 0, "noise_power_w must be > 0");
    require(bler_slope_per_db > 0, "bler_slope_per_db must be > 0");
    require(harq_combining_gain_db >= 0, "harq_combining_gain_db must be >= 0");
    require(carrier_ghz > 0, "carrier_ghz must be > 0");
    require(bandwidth_mhz > 0, "bandwidth_mhz must be > 0");
}

PathGainField::PathGainField(std::vector<std::vector<double>> snapshots, int n_gnbs,
                             int n_devices, Tick update_period, GainMode mode)
    : snapshots_(std::move(snapshots)),
      n_gnbs_(n_gnbs),
      n_devices_(n_devices),
      update_period_(update_period),
      mode_(mode)
{
    require(n_gnbs_ > 0 && n_devices_ > 0, "field dimensions must be positive");
    require(!snapshots_.empty(), "field needs at least one snapshot");
    require(snapshots_.size() == 1 || update_period_ > 0,
            "time-indexed field needs a positive update period");
    const std::size_t expected = static_cast<std::size_t>(n_gnbs_) * n_devices_;
    for (const auto& snap : snapshots_) {
        require(snap.size() == expected, "snapshot size does not match topology");
        for (double g : snap) {
            require(g > 0 && std::isfinite(g), "path gains must be positive and finite");
        }
    }
    stationary_mean_db.resize(expected, 0.0);
    for (std::size_t i = 0; i < expected; ++i) {
        stationary_mean_db[i] = 10.0 * std::log10(snapshots_.front()[i]);
    }
}

std::size_t PathGainField::snapshot_index(Tick t) const
{
    if (snapshots_.size() == 1 || t <= 0) return 0;
    auto idx = static_cast<std::size_t>(t / update_period_);
    return std::min(idx, snapshots_.size() - 1);
}

double PathGainField::gain(int gnb, int device, Tick t) const
{
    require(gnb >= 0 && gnb < n_gnbs_, "gNB index out of range");
    require(device >= 0 && device < n_devices_, "device index out of range");
    return snapshots_[snapshot_index(t)][static_cast<std::size_t>(gnb) * n_devices_ + device];
}

double PathGainField::gain_db(int gnb, int device, Tick t) const
{
    return 10.0 * std::log10(gain(gnb, device, t));
}

double sinr_db(int serving_gnb, int device, std::span<const double> tx_powers_w,
               std::span<const bool> active, const PathGainField& field, Tick t,
               const RadioConfig& cfg)
{
    require(serving_gnb >= 0 && serving_gnb < field.n_gnbs(), "serving gNB out of range");
    require(static_cast<int>(tx_powers_w.size()) == field.n_gnbs(), "power vector length mismatch");
    require(static_cast<int>(active.size()) == field.n_gnbs(), "active mask length mismatch");
    for (double p : tx_powers_w) require(p >= 0, "transmit powers must be >= 0");

    double signal = tx_powers_w[serving_gnb] * field.gain(serving_gnb, device, t);
    require(signal > 0 || cfg.noise_power_w > 0, "degenerate zero-signal, zero-noise SINR");

    double interference = 0.0;
    for (int b = 0; b < field.n_gnbs(); ++b) {
        if (b == serving_gnb || !active[b]) continue;
        interference += tx_powers_w[b] * field.gain(b, device, t);
    }
    return 10.0 * std::log10(signal / (interference + cfg.noise_power_w));
}

double bler(double sinr_db, int attempt_index, const RadioConfig& cfg)
{
    require(attempt_index >= 1, "attempt index must be >= 1");
    double effective = sinr_db + (attempt_index - 1) * cfg.harq_combining_gain_db;
    return 1.0 / (1.0 + std::exp(cfg.bler_slope_per_db * (effective - cfg.bler_midpoint_db)));
}

PathGainField evolve(const PathGainField& field, std::uint64_t rng_seed, double dt_s)
{
    require(field.mode() == GainMode::kGaussMarkov, "evolve requires gauss_markov mode");
    require(field.n_snapshots() == 1, "evolve operates on single-snapshot fields");
    require(dt_s > 0, "dt must be positive");

    double a = field.corr_time_s > 0 ? std::exp(-dt_s / field.corr_time_s) : 0.0;
    double innovation_scale = field.shadowing_sigma_db * std::sqrt(1.0 - a * a);

    Rng rng(rng_seed);
    std::vector<double> next(field.snapshots().front().size());
    for (std::size_t i = 0; i < next.size(); ++i) {
        double g_db = 10.0 * std::log10(field.snapshots().front()[i]);
        double mu = field.stationary_mean_db[i];
        double x = mu + a * (g_db - mu) + innovation_scale * rng.normal();
        next[i] = std::pow(10.0, x / 10.0);
    }

    PathGainField out({std::move(next)}, field.n_gnbs(), field.n_devices(),
                      field.update_period(), GainMode::kGaussMarkov);
    out.stationary_mean_db = field.stationary_mean_db;
    out.shadowing_sigma_db = field.shadowing_sigma_db;
    out.corr_time_s = field.corr_time_s;
    return out;
}

PathGainField ingest_gains(std::istream& in, Tick update_period)
{
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty path-gain file");
    if (line != "snapshot,gnb,device,gain_linear")
        throw std::invalid_argument("bad path-gain header: " + line);

    struct Row {
        long snapshot, gnb, device;
        double gain;
    };
    std::vector<Row> rows;
    long max_snap = -1, max_gnb = -1, max_dev = -1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        Row r{};
        char c1, c2, c3;
        if (!(ls >> r.snapshot >> c1 >> r.gnb >> c2 >> r.device >> c3 >> r.gain) || c1 != ',' ||
            c2 != ',' || c3 != ',') {
            throw std::invalid_argument("malformed path-gain row at line " +
                                        std::to_string(line_no) + ": " + line);
        }
        std::string rest;
        if (ls >> rest)
            throw std::invalid_argument("trailing data in path-gain row at line " +
                                        std::to_string(line_no));
        if (r.snapshot < 0 || r.gnb < 0 || r.device < 0)
            throw std::invalid_argument("negative index in path-gain row at line " +
                                        std::to_string(line_no));
        if (!(r.gain > 0) || !std::isfinite(r.gain))
            throw std::invalid_argument("non-positive gain at line " + std::to_string(line_no));
        max_snap = std::max(max_snap, r.snapshot);
        max_gnb = std::max(max_gnb, r.gnb);
        max_dev = std::max(max_dev, r.device);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::invalid_argument("path-gain file has no rows");

    const long n_snaps = max_snap + 1, n_gnbs = max_gnb + 1, n_devs = max_dev + 1;
    const std::size_t per_snap = static_cast<std::size_t>(n_gnbs * n_devs);
    if (rows.size() != per_snap * static_cast<std::size_t>(n_snaps))
        throw std::invalid_argument("path-gain file dimension mismatch: got " +
                                    std::to_string(rows.size()) + " rows, expected " +
                                    std::to_string(per_snap * n_snaps));

    std::vector<std::vector<double>> snaps(static_cast<std::size_t>(n_snaps),
                                           std::vector<double>(per_snap, 0.0));
    std::vector<bool> seen(rows.size(), false);
    for (const auto& r : rows) {
        std::size_t flat = static_cast<std::size_t>(r.snapshot) * per_snap +
                           static_cast<std::size_t>(r.gnb) * n_devs + r.device;
        if (flat >= seen.size() || seen[flat])
            throw std::invalid_argument("duplicate or out-of-grid path-gain row");
        seen[flat] = true;
        snaps[static_cast<std::size_t>(r.snapshot)]
             [static_cast<std::size_t>(r.gnb) * n_devs + r.device] = r.gain;
    }

    GainMode mode = n_snaps > 1 ? GainMode::kIngested : GainMode::kStatic;
    if (n_snaps > 1 && update_period <= 0)
        throw std::invalid_argument("multi-snapshot ingestion needs gain_update_period_s");
    return PathGainField(std::move(snaps), static_cast<int>(n_gnbs), static_cast<int>(n_devs),
                         n_snaps > 1 ? update_period : Tick{0}, mode);
}

PathGainField ingest_gains(const std::string& path, Tick update_period)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open path-gain file: " + path);
    return ingest_gains(in, update_period);
}

void export_gains(std::ostream& out, const PathGainField& field)
{
    out << "snapshot,gnb,device,gain_linear\n";
    for (std::size_t s = 0; s < field.n_snapshots(); ++s) {
        for (int b = 0; b < field.n_gnbs(); ++b) {
            for (int u = 0; u < field.n_devices(); ++u) {
                out << s << ',' << b << ',' << u << ','
                    << fmt_double(field.snapshots()[s][static_cast<std::size_t>(b) *
                                                           field.n_devices() +
                                                       u])
                    << '\n';
            }
        }
    }
}

PathGainField make_synthetic_field(int n_gnbs, int n_devices, std::uint64_t seed,
                                   const SyntheticChannelParams& params, const RadioConfig& radio,
                                   GainMode mode)
{
    require(n_gnbs > 0 && n_devices > 0, "topology must be positive");
    Rng rng(seed);

    struct Pos {
        double x, y, z;
    };
    std::vector<Pos> gnbs(static_cast<std::size_t>(n_gnbs));
    for (int b = 0; b < n_gnbs; ++b) {
        gnbs[b] = {(b + 0.5) * params.floor_width_m / n_gnbs, params.floor_depth_m / 2.0,
                   params.gnb_height_m};
    }
    // contiguous equal blocks of devices per gNB, each inside its cell's strip
    std::vector<Pos> devices(static_cast<std::size_t>(n_devices));
    const double strip = params.floor_width_m / n_gnbs;
    const int per_gnb = (n_devices + n_gnbs - 1) / n_gnbs;
    for (int u = 0; u < n_devices; ++u) {
        int serving = std::min(u / per_gnb, n_gnbs - 1);
        devices[u] = {serving * strip + rng.uniform() * strip,
                      rng.uniform() * params.floor_depth_m, params.device_height_m};
    }

    // free-space reference loss at 1 m for the configured carrier
    const double carrier_hz = radio.carrier_ghz * 1e9;
    const double ref_loss_db = 20.0 * std::log10(4.0 * std::numbers::pi * carrier_hz / 299792458.0);

    std::vector<double> gains(static_cast<std::size_t>(n_gnbs) * n_devices);
    for (int b = 0; b < n_gnbs; ++b) {
        for (int u = 0; u < n_devices; ++u) {
            double dx = gnbs[b].x - devices[u].x;
            double dy = gnbs[b].y - devices[u].y;
            double dz = gnbs[b].z - devices[u].z;
            double d = std::max(1.0, std::sqrt(dx * dx + dy * dy + dz * dz));
            double loss_db = ref_loss_db + 10.0 * params.path_loss_exponent * std::log10(d) +
                             params.shadowing_sigma_db * rng.normal();
            gains[static_cast<std::size_t>(b) * n_devices + u] = std::pow(10.0, -loss_db / 10.0);
        }
    }

    PathGainField field({std::move(gains)}, n_gnbs, n_devices,
                        mode == GainMode::kGaussMarkov ? to_ticks(params.gain_update_period_s)
                                                       : Tick{0},
                        mode);
    field.shadowing_sigma_db = params.shadowing_sigma_db;
    field.corr_time_s = params.corr_time_s;
    return field;
}

} // namespace urllc::channel
