#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "urllc/ticks.hpp"

namespace urllc::channel {

struct RadioConfig {
    double noise_power_w = 1e-13;
    double carrier_ghz = 2.6;
    double bandwidth_mhz = 20.0;
    double bler_midpoint_db = 5.0;
    double bler_slope_per_db = 1.0;
    double harq_combining_gain_db = 3.0;

    void validate() const;
};

enum class GainMode { kStatic, kIngested, kGaussMarkov };

/// Per-(gNB, device) linear power gains, either a single frozen snapshot or
/// a sequence of snapshots advanced every update period. For the
/// gauss_markov mode the snapshot is the current state of a log-domain AR(1)
/// process whose stationary mean is kept alongside.
class PathGainField {
public:
    PathGainField(std::vector<std::vector<double>> snapshots, int n_gnbs, int n_devices,
                  Tick update_period, GainMode mode);

    int n_gnbs() const { return n_gnbs_; }
    int n_devices() const { return n_devices_; }
    GainMode mode() const { return mode_; }
    Tick update_period() const { return update_period_; }
    std::size_t n_snapshots() const { return snapshots_.size(); }

    double gain(int gnb, int device, Tick t = 0) const;
    double gain_db(int gnb, int device, Tick t = 0) const;

    const std::vector<std::vector<double>>& snapshots() const { return snapshots_; }

    // AR(1) parameters (gauss_markov mode), all in dB domain.
    std::vector<double> stationary_mean_db; // per (gnb, device), row-major
    double shadowing_sigma_db = 8.0;
    double corr_time_s = 0.05;

private:
    std::size_t snapshot_index(Tick t) const;

    std::vector<std::vector<double>> snapshots_; // [S][B*U], row-major by gNB
    int n_gnbs_ = 0;
    int n_devices_ = 0;
    Tick update_period_ = 0;
    GainMode mode_ = GainMode::kStatic;
};

/// Downlink SINR in dB for one device: serving power times serving gain over
/// interference from the other active gNBs plus noise. `tx_powers_w[b]` is
/// the transmit power attributed to gNB b for this resource; only entries
/// with `active[b]` set contribute interference.
double sinr_db(int serving_gnb, int device, std::span<const double> tx_powers_w,
               std::span<const bool> active, const PathGainField& field, Tick t,
               const RadioConfig& cfg);

/// Logistic block-error curve with HARQ combining: the effective SNR of the
/// n-th attempt is sinr + (n-1) * combining gain.
double bler(double sinr_db, int attempt_index, const RadioConfig& cfg);

/// One log-domain AR(1) step of length dt over every entry:
///   g_db <- mu + a (g_db - mu) + sigma sqrt(1 - a^2) xi,  a = exp(-dt/tau).
/// Pure function of (field, seed); the stationary law is preserved.
PathGainField evolve(const PathGainField& field, std::uint64_t rng_seed, double dt_s);

/// Path-gain CSV: header `snapshot,gnb,device,gain_linear`, gains printed
/// with enough digits to round-trip exactly.
PathGainField ingest_gains(const std::string& path, Tick update_period = 0);
PathGainField ingest_gains(std::istream& in, Tick update_period = 0);
void export_gains(std::ostream& out, const PathGainField& field);

struct SyntheticChannelParams {
    double floor_width_m = 40.0;
    double floor_depth_m = 25.0;
    double gnb_height_m = 8.0;
    double device_height_m = 1.5;
    double path_loss_exponent = 3.0;
    double shadowing_sigma_db = 3.0;
    // minimum serving-gain advantage over the strongest other gNB; draws are
    // rejected until a device clears it, which pins the bottom of the SIR
    // distribution just above serviceable
    double min_gain_gap_db = 3.0;
    double corr_time_s = 0.05;
    double gain_update_period_s = 0.01;
};

/// Default deployment: gNBs spaced along the hall's long axis, each device
/// dropped uniformly inside its serving gNB's strip of the floor (devices
/// are assigned to gNBs in contiguous equal blocks), log-distance path loss
/// at the carrier frequency plus log-normal shadowing. Frozen unless mode is
/// gauss_markov.
PathGainField make_synthetic_field(int n_gnbs, int n_devices, std::uint64_t seed,
                                   const SyntheticChannelParams& params, const RadioConfig& radio,
                                   GainMode mode = GainMode::kStatic);

} // namespace urllc::channel
