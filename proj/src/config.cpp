#include "urllc/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace urllc::config {

namespace {

[[noreturn]] void key_error(const std::string& key, const std::string& what)
{
    throw std::invalid_argument("config key '" + key + "': " + what);
}

double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) key_error(key, "trailing characters in '" + v + "'");
        return d;
    } catch (const std::invalid_argument&) {
        key_error(key, "not a number: '" + v + "'");
    } catch (const std::out_of_range&) {
        key_error(key, "out of range: '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v)
{
    long long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        key_error(key, "not an integer: '" + v + "'");
    return out;
}

std::vector<std::string> split_csv(const std::string& v)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream ss(v);
    while (std::getline(ss, cur, ',')) parts.push_back(cur);
    return parts;
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void ExperimentConfig::apply(const std::string& key, const std::string& value)
{
    auto as_d = [&] { return parse_double(key, value); };
    auto as_i = [&] { return static_cast<int>(parse_int(key, value)); };

    // scenario
    if (key == "n_gnbs") scenario.n_gnbs = as_i();
    else if (key == "devices_per_gnb") {
        scenario.devices_per_gnb.clear();
        for (const auto& p : split_csv(value))
            scenario.devices_per_gnb.push_back(static_cast<int>(parse_int(key, p)));
    }
    else if (key == "tti_s") scenario.tti_s = as_d();
    else if (key == "traffic_period_s") scenario.traffic_period_s = as_d();
    else if (key == "delay_bound_s") scenario.delay_bound_s = as_d();
    else if (key == "survival_time_s") scenario.survival_time_s = as_d();
    else if (key == "power_levels_w") {
        scenario.power_levels_w.clear();
        for (const auto& p : split_csv(value)) scenario.power_levels_w.push_back(parse_double(key, p));
    }
    else if (key == "retx_levels") {
        scenario.retx_levels.clear();
        for (const auto& p : split_csv(value))
            scenario.retx_levels.push_back(static_cast<int>(parse_int(key, p)));
    }
    else if (key == "episode_s") scenario.episode_s = as_d();
    else if (key == "low_step_s") scenario.low_step_s = as_d();
    else if (key == "timescale_ratio") scenario.timescale_ratio = as_i();
    else if (key == "rng_seed") scenario.rng_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "harq_feedback_extra_ttis") scenario.harq_feedback_extra_ttis = as_i();
    else if (key == "per_tti_capacity") scenario.per_tti_capacity = as_i();
    // radio
    else if (key == "noise_power_w") radio.noise_power_w = as_d();
    else if (key == "carrier_ghz") radio.carrier_ghz = as_d();
    else if (key == "bandwidth_mhz") radio.bandwidth_mhz = as_d();
    else if (key == "bler_midpoint_db") radio.bler_midpoint_db = as_d();
    else if (key == "bler_slope_per_db") radio.bler_slope_per_db = as_d();
    else if (key == "harq_combining_gain_db") radio.harq_combining_gain_db = as_d();
    // channel
    else if (key == "channel_mode") {
        if (value != "static" && value != "gauss_markov" && value != "ingested")
            key_error(key, "must be static, gauss_markov, or ingested");
        channel_mode = value;
    }
    else if (key == "gains_csv") gains_csv = value;
    else if (key == "floor_width_m") synth.floor_width_m = as_d();
    else if (key == "floor_depth_m") synth.floor_depth_m = as_d();
    else if (key == "gnb_height_m") synth.gnb_height_m = as_d();
    else if (key == "device_height_m") synth.device_height_m = as_d();
    else if (key == "path_loss_exponent") synth.path_loss_exponent = as_d();
    else if (key == "shadowing_sigma_db") synth.shadowing_sigma_db = as_d();
    else if (key == "corr_time_s") synth.corr_time_s = as_d();
    else if (key == "gain_update_period_s") synth.gain_update_period_s = as_d();
    // feature normalization
    else if (key == "feat_plr_min") norm.plr.lo = as_d();
    else if (key == "feat_plr_max") norm.plr.hi = as_d();
    else if (key == "feat_downtime_s_min") norm.downtime_s.lo = as_d();
    else if (key == "feat_downtime_s_max") norm.downtime_s.hi = as_d();
    else if (key == "feat_delay_s_min") norm.delay_s.lo = as_d();
    else if (key == "feat_delay_s_max") norm.delay_s.hi = as_d();
    else if (key == "feat_harq_tx_min") norm.harq_tx.lo = as_d();
    else if (key == "feat_harq_tx_max") norm.harq_tx.hi = as_d();
    else if (key == "feat_rb_used_min") norm.rb_used.lo = as_d();
    else if (key == "feat_rb_used_max") norm.rb_used.hi = as_d();
    else if (key == "feat_sinr_db_min") norm.sinr_db.lo = as_d();
    else if (key == "feat_sinr_db_max") norm.sinr_db.hi = as_d();
    else if (key == "feat_path_gain_db_min") norm.path_gain_db.lo = as_d();
    else if (key == "feat_path_gain_db_max") norm.path_gain_db.hi = as_d();
    else if (key == "feat_rlc_buffer_min") norm.rlc_buffer.lo = as_d();
    else if (key == "feat_rlc_buffer_max") norm.rlc_buffer.hi = as_d();
    // rewards
    else if (key == "omega") reward.omega = as_d();
    else if (key == "eta") reward.eta = as_d();
    else if (key == "reward_mode") {
        if (value == "average") reward.mode = rewards::Mode::kAverage;
        else if (value == "risk_sensitive") reward.mode = rewards::Mode::kRiskSensitive;
        else key_error(key, "must be average or risk_sensitive");
    }
    // learning
    else if (key == "discount") hyper.discount = as_d();
    else if (key == "learning_rate") hyper.learning_rate = as_d();
    else if (key == "batch_size") hyper.batch_size = as_i();
    else if (key == "entropy_temperature") hyper.entropy_temperature = as_d();
    else if (key == "target_update_rate") hyper.target_update_rate = as_d();
    else if (key == "replay_capacity") hyper.replay_capacity = static_cast<std::size_t>(parse_int(key, value));
    else if (key == "hidden_layers") {
        hyper.hidden.clear();
        for (const auto& p : split_csv(value))
            hyper.hidden.push_back(static_cast<int>(parse_int(key, p)));
    }
    else if (key == "explore_temp_scale") hyper.explore_temp_scale = as_d();
    else if (key == "explore_decay_steps") hyper.explore_decay_steps = parse_int(key, value);
    // orchestration
    else if (key == "convergence_window") convergence.window = as_i();
    else if (key == "convergence_tolerance") convergence.tolerance = as_d();
    else if (key == "convergence_patience") convergence.patience = as_i();
    else if (key == "episode_budget") episode_budget = as_i();
    else if (key == "eval_episodes") eval_episodes = as_i();
    else key_error(key, "unknown key");
}

void ExperimentConfig::validate() const
{
    scenario.validate();
    radio.validate();
    reward.validate();
    hyper.validate();
    convergence.validate();
    if (episode_budget < 1) throw std::invalid_argument("config key 'episode_budget': must be >= 1");
    if (eval_episodes < 1) throw std::invalid_argument("config key 'eval_episodes': must be >= 1");
    if (channel_mode == "ingested" && gains_csv.empty())
        throw std::invalid_argument("config key 'gains_csv': required for channel_mode=ingested");
}

ExperimentConfig ExperimentConfig::from_stream(std::istream& in)
{
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key=value, got '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            auto b2 = s.find_first_not_of(" \t");
            auto e2 = s.find_last_not_of(" \t");
            s = b2 == std::string::npos ? "" : s.substr(b2, e2 - b2 + 1);
        };
        trim(key);
        trim(value);
        cfg.apply(key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return from_stream(in);
}

void ExperimentConfig::write_resolved(std::ostream& out) const
{
    auto kv = [&](const std::string& k, const std::string& v) { out << k << '=' << v << '\n'; };
    auto kd = [&](const std::string& k, double v) { kv(k, fmt_double(v)); };
    auto ki = [&](const std::string& k, long long v) { kv(k, std::to_string(v)); };

    ki("n_gnbs", scenario.n_gnbs);
    {
        std::string v;
        for (std::size_t i = 0; i < scenario.devices_per_gnb.size(); ++i)
            v += (i ? "," : "") + std::to_string(scenario.devices_per_gnb[i]);
        kv("devices_per_gnb", v);
    }
    kd("tti_s", scenario.tti_s);
    kd("traffic_period_s", scenario.traffic_period_s);
    kd("delay_bound_s", scenario.delay_bound_s);
    kd("survival_time_s", scenario.survival_time_s);
    {
        std::string v;
        for (std::size_t i = 0; i < scenario.power_levels_w.size(); ++i)
            v += (i ? "," : "") + fmt_double(scenario.power_levels_w[i]);
        kv("power_levels_w", v);
    }
    {
        std::string v;
        for (std::size_t i = 0; i < scenario.retx_levels.size(); ++i)
            v += (i ? "," : "") + std::to_string(scenario.retx_levels[i]);
        kv("retx_levels", v);
    }
    kd("episode_s", scenario.episode_s);
    kd("low_step_s", scenario.low_step_s);
    ki("timescale_ratio", scenario.timescale_ratio);
    ki("rng_seed", static_cast<long long>(scenario.rng_seed));
    ki("harq_feedback_extra_ttis", scenario.harq_feedback_extra_ttis);
    ki("per_tti_capacity", scenario.per_tti_capacity);

    kd("noise_power_w", radio.noise_power_w);
    kd("carrier_ghz", radio.carrier_ghz);
    kd("bandwidth_mhz", radio.bandwidth_mhz);
    kd("bler_midpoint_db", radio.bler_midpoint_db);
    kd("bler_slope_per_db", radio.bler_slope_per_db);
    kd("harq_combining_gain_db", radio.harq_combining_gain_db);

    kv("channel_mode", channel_mode);
    if (!gains_csv.empty()) kv("gains_csv", gains_csv);
    kd("floor_width_m", synth.floor_width_m);
    kd("floor_depth_m", synth.floor_depth_m);
    kd("gnb_height_m", synth.gnb_height_m);
    kd("device_height_m", synth.device_height_m);
    kd("path_loss_exponent", synth.path_loss_exponent);
    kd("shadowing_sigma_db", synth.shadowing_sigma_db);
    kd("corr_time_s", synth.corr_time_s);
    kd("gain_update_period_s", synth.gain_update_period_s);

    kd("feat_plr_min", norm.plr.lo);
    kd("feat_plr_max", norm.plr.hi);
    kd("feat_downtime_s_min", norm.downtime_s.lo);
    kd("feat_downtime_s_max", norm.downtime_s.hi);
    kd("feat_delay_s_min", norm.delay_s.lo);
    kd("feat_delay_s_max", norm.delay_s.hi);
    kd("feat_harq_tx_min", norm.harq_tx.lo);
    kd("feat_harq_tx_max", norm.harq_tx.hi);
    kd("feat_rb_used_min", norm.rb_used.lo);
    kd("feat_rb_used_max", norm.rb_used.hi);
    kd("feat_sinr_db_min", norm.sinr_db.lo);
    kd("feat_sinr_db_max", norm.sinr_db.hi);
    kd("feat_path_gain_db_min", norm.path_gain_db.lo);
    kd("feat_path_gain_db_max", norm.path_gain_db.hi);
    kd("feat_rlc_buffer_min", norm.rlc_buffer.lo);
    kd("feat_rlc_buffer_max", norm.rlc_buffer.hi);

    kd("omega", reward.omega);
    kd("eta", reward.eta);
    kv("reward_mode", reward.mode == rewards::Mode::kAverage ? "average" : "risk_sensitive");

    kd("discount", hyper.discount);
    kd("learning_rate", hyper.learning_rate);
    ki("batch_size", hyper.batch_size);
    kd("entropy_temperature", hyper.entropy_temperature);
    kd("target_update_rate", hyper.target_update_rate);
    ki("replay_capacity", static_cast<long long>(hyper.replay_capacity));
    {
        std::string v;
        for (std::size_t i = 0; i < hyper.hidden.size(); ++i)
            v += (i ? "," : "") + std::to_string(hyper.hidden[i]);
        kv("hidden_layers", v);
    }
    kd("explore_temp_scale", hyper.explore_temp_scale);
    ki("explore_decay_steps", hyper.explore_decay_steps);

    ki("convergence_window", convergence.window);
    kd("convergence_tolerance", convergence.tolerance);
    ki("convergence_patience", convergence.patience);
    ki("episode_budget", episode_budget);
    ki("eval_episodes", eval_episodes);
}

channel::PathGainField ExperimentConfig::make_field(std::uint64_t channel_seed) const
{
    if (channel_mode == "ingested") {
        return channel::ingest_gains(gains_csv, to_ticks(synth.gain_update_period_s));
    }
    auto mode = channel_mode == "gauss_markov" ? channel::GainMode::kGaussMarkov
                                               : channel::GainMode::kStatic;
    return channel::make_synthetic_field(scenario.n_gnbs, scenario.total_devices(), channel_seed,
                                         synth, radio, mode);
}

} // namespace urllc::config
