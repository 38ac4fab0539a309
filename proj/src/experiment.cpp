#include "urllc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "urllc/features.hpp"
#include "urllc/gateway.hpp"

namespace urllc::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Setup parse_setup(const std::string& name)
{
    if (name == "maxretpwr") return Setup::kMaxRetPwr;
    if (name == "rlavg") return Setup::kRlAvg;
    if (name == "rlrisksen") return Setup::kRlRiskSen;
    if (name == "hrlavg") return Setup::kHrlAvg;
    if (name == "hrlrisksen") return Setup::kHrlRiskSen;
    throw std::invalid_argument(
        "unknown setup '" + name +
        "' (expected maxretpwr, rlavg, rlrisksen, hrlavg, or hrlrisksen)");
}

const char* setup_name(Setup s)
{
    switch (s) {
    case Setup::kMaxRetPwr: return "maxretpwr";
    case Setup::kRlAvg: return "rlavg";
    case Setup::kRlRiskSen: return "rlrisksen";
    case Setup::kHrlAvg: return "hrlavg";
    case Setup::kHrlRiskSen: return "hrlrisksen";
    }
    return "?";
}

hier::Framework framework_of(Setup s)
{
    switch (s) {
    case Setup::kMaxRetPwr: return hier::Framework::kFixedBaseline;
    case Setup::kRlAvg:
    case Setup::kRlRiskSen: return hier::Framework::kFlatRl;
    case Setup::kHrlAvg:
    case Setup::kHrlRiskSen: return hier::Framework::kHrl;
    }
    return hier::Framework::kFixedBaseline;
}

bool is_learning(Setup s) { return s != Setup::kMaxRetPwr; }

std::optional<rewards::Mode> reward_mode_of(Setup s)
{
    switch (s) {
    case Setup::kMaxRetPwr: return std::nullopt;
    case Setup::kRlAvg:
    case Setup::kHrlAvg: return rewards::Mode::kAverage;
    case Setup::kRlRiskSen:
    case Setup::kHrlRiskSen: return rewards::Mode::kRiskSensitive;
    }
    return std::nullopt;
}

std::uint64_t channel_seed(std::uint64_t base) { return derive_seed(base, 0xC4A77EF); }
std::uint64_t episode_seed(std::uint64_t base, int episode)
{
    return derive_seed(base, 0xE0000 + static_cast<std::uint64_t>(episode));
}
std::uint64_t eval_seed(std::uint64_t base, int eval_episode)
{
    return derive_seed(base, 0xF0000 + static_cast<std::uint64_t>(eval_episode));
}
std::uint64_t agent_seed(std::uint64_t base, int ordinal)
{
    return derive_seed(base, 0xA0000 + static_cast<std::uint64_t>(ordinal));
}

double RunOutcome::mean_availability() const
{
    if (metrics.empty()) return 0.0;
    double s = 0.0;
    for (const auto& m : metrics) s += m.availability;
    return s / static_cast<double>(metrics.size());
}

double RunOutcome::p5_availability() const
{
    std::vector<double> vals;
    vals.reserve(metrics.size());
    for (const auto& m : metrics) vals.push_back(m.availability);
    return features::nearest_rank_percentile(vals, 5.0);
}

double RunOutcome::mean_crossing_rate() const
{
    if (metrics.empty()) return 0.0;
    double s = 0.0;
    for (const auto& m : metrics) s += m.crossing_rate;
    return s / static_cast<double>(metrics.size());
}

hier::AgentSet build_agents(const config::ExperimentConfig& cfg, Setup setup, std::uint64_t seed)
{
    hier::AgentSet set;
    set.framework = framework_of(setup);
    const auto& s = cfg.scenario;
    const int fpd = features::kFeaturesPerDevice;
    if (set.framework == hier::Framework::kFlatRl) {
        learn::SacAgent agent(fpd * s.total_devices(), hier::flat_head(s), cfg.hyper,
                              agent_seed(seed, 0));
        set.flat = std::make_unique<hier::SacActor>(std::move(agent), learn::StepKind::kFlat, true);
    } else if (set.framework == hier::Framework::kHrl) {
        learn::SacAgent high(fpd * s.total_devices(), hier::high_head(s), cfg.hyper,
                             agent_seed(seed, 0));
        set.high = std::make_unique<hier::SacActor>(std::move(high), learn::StepKind::kHigh, true);
        for (int b = 0; b < s.n_gnbs; ++b) {
            learn::SacAgent low(fpd * s.devices_per_gnb[b], hier::low_head(s, b), cfg.hyper,
                                agent_seed(seed, 1 + b));
            set.low.push_back(
                std::make_unique<hier::SacActor>(std::move(low), learn::StepKind::kLow, true));
        }
    }
    return set;
}

hier::AgentSet connect_gateway_agents(const std::string& endpoint,
                                      const netsim::ScenarioConfig& scenario,
                                      hier::Framework framework)
{
    std::vector<std::string> expected;
    if (framework == hier::Framework::kFlatRl) {
        expected = {"flat"};
    } else if (framework == hier::Framework::kHrl) {
        expected.push_back("high");
        for (int b = 0; b < scenario.n_gnbs; ++b) expected.push_back("low" + std::to_string(b));
    } else {
        throw std::invalid_argument("fixed baseline takes no external agents");
    }
    gateway::AgentHub hub(endpoint, expected);
    hub.accept_all();
    hier::AgentSet set;
    set.framework = framework;
    if (framework == hier::Framework::kFlatRl) {
        set.flat = hub.take_actor("flat");
    } else {
        set.high = hub.take_actor("high");
        for (int b = 0; b < scenario.n_gnbs; ++b)
            set.low.push_back(hub.take_actor("low" + std::to_string(b)));
    }
    return set;
}

namespace {

void for_each_sac(hier::AgentSet& agents, const std::function<void(hier::SacActor&)>& fn)
{
    auto apply = [&](std::unique_ptr<hier::Actor>& a) {
        if (auto* sac = dynamic_cast<hier::SacActor*>(a.get())) fn(*sac);
    };
    if (agents.flat) apply(agents.flat);
    if (agents.high) apply(agents.high);
    for (auto& l : agents.low) apply(l);
}

} // namespace

RunOutcome run_single(const config::ExperimentConfig& cfg, Setup setup, std::uint64_t seed,
                      hier::AgentSet* external_agents, bool keep_traces)
{
    config::ExperimentConfig run_cfg = cfg;
    if (auto mode = reward_mode_of(setup)) run_cfg.reward.mode = *mode;
    run_cfg.validate();

    RunOutcome out;
    out.run_id = std::string(setup_name(setup)) + "_seed" + std::to_string(seed);
    out.setup = setup;
    out.seed = seed;

    auto field = run_cfg.make_field(channel_seed(seed));

    hier::AgentSet own_agents;
    hier::AgentSet* agents = external_agents;
    if (!agents) {
        own_agents = build_agents(run_cfg, setup, seed);
        agents = &own_agents;
    }

    // training phase
    if (is_learning(setup)) {
        for (int ep = 0; ep < run_cfg.episode_budget; ++ep) {
            auto ep_seed = episode_seed(seed, ep);
            netsim::Simulator sim(run_cfg.scenario, field, run_cfg.radio, ep_seed);
            hier::EpisodeOptions opts;
            opts.explore = true;
            opts.phase = hier::Phase::kTraining;
            opts.reset_seed = ep_seed;
            auto log = hier::run_episode(sim, *agents, run_cfg.reward, run_cfg.norm, opts);
            out.ledger.merge(log.ledger);
            out.training_rewards.push_back(log.mean_step_reward);
            out.episodes_trained = ep + 1;
            auto conv = hier::detect_convergence(out.training_rewards, run_cfg.convergence);
            if (conv) {
                out.convergence_episode = conv;
                out.ledger.convergence_step = *conv;
                break;
            }
        }
    }

    // evaluation phase: greedy policies, fresh seeds, no learning
    for_each_sac(*agents, [](hier::SacActor& sac) { sac.set_learning(false); });
    for (int e = 0; e < run_cfg.eval_episodes; ++e) {
        auto ev_seed = eval_seed(seed, e);
        netsim::Simulator sim(run_cfg.scenario, field, run_cfg.radio, ev_seed);
        hier::EpisodeOptions opts;
        opts.explore = false;
        opts.phase = hier::Phase::kInference;
        opts.reset_seed = ev_seed;
        opts.keep_traces = keep_traces && e == 0;
        auto log = hier::run_episode(sim, *agents, run_cfg.reward, run_cfg.norm, opts);
        out.ledger.merge(log.ledger);
        out.eval_rewards.push_back(log.mean_step_reward);
        for (const auto& dk : log.device_kpis) {
            out.metrics.push_back({e, dk.device, dk.availability, dk.crossing_rate,
                                   dk.mean_uptime_s});
        }
        if (opts.keep_traces) out.sample_traces = std::move(log.y_traces);
    }
    for_each_sac(*agents, [](hier::SacActor& sac) { sac.set_learning(true); });

    return out;
}

namespace {

void save_checkpoints(const fs::path& run_dir, hier::AgentSet& agents)
{
    auto save_one = [&](const std::string& name, hier::Actor* actor) {
        auto* sac = dynamic_cast<hier::SacActor*>(actor);
        if (!sac) return;
        std::ofstream out(run_dir / (name + ".ckpt"));
        sac->agent().save(out);
    };
    if (agents.flat) save_one("flat", agents.flat.get());
    if (agents.high) save_one("high", agents.high.get());
    for (std::size_t b = 0; b < agents.low.size(); ++b)
        save_one("low" + std::to_string(b), agents.low[b].get());
}

} // namespace

void run_experiment(const ExperimentSpec& spec)
{
    if (spec.seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
    fs::create_directories(spec.out_dir);
    {
        std::ofstream rc(fs::path(spec.out_dir) / "resolved_config.txt");
        if (!rc) throw std::runtime_error("output directory not writable: " + spec.out_dir);
        config::ExperimentConfig resolved = spec.cfg;
        if (auto mode = reward_mode_of(spec.setup)) resolved.reward.mode = *mode;
        resolved.write_resolved(rc);
    }

    std::ofstream runs(fs::path(spec.out_dir) / "runs.csv");
    std::ofstream metrics(fs::path(spec.out_dir) / "metrics.csv");
    std::ofstream aggregates(fs::path(spec.out_dir) / "aggregates.csv");
    std::ofstream signals(fs::path(spec.out_dir) / "signals.csv");
    std::ofstream rewards_csv(fs::path(spec.out_dir) / "rewards.csv");
    runs << "run,setup,seed,episodes_trained,convergence_episode,training_messages,"
            "inference_messages\n";
    metrics << "run,setup,seed,eval_episode,device,availability,crossing_rate,mean_uptime_s\n";
    aggregates << "run,setup,seed,mean_availability,p5_availability,mean_crossing_rate\n";
    signals << "run,setup,seed,agent,phase,to_gnb,from_gnb\n";
    rewards_csv << "run,setup,seed,phase,episode,reward\n";

    for (auto seed : spec.seeds) {
        config::ExperimentConfig run_cfg = spec.cfg;
        if (auto mode = reward_mode_of(spec.setup)) run_cfg.reward.mode = *mode;

        hier::AgentSet agents;
        bool remote_agents = !spec.gateway_endpoint.empty() &&
                             framework_of(spec.setup) != hier::Framework::kFixedBaseline;
        if (remote_agents) {
            agents = connect_gateway_agents(spec.gateway_endpoint, run_cfg.scenario,
                                            framework_of(spec.setup));
        } else {
            agents = build_agents(run_cfg, spec.setup, seed);
        }
        RunOutcome out = run_single(spec.cfg, spec.setup, seed, &agents, spec.dump_traces);

        if (!remote_agents && is_learning(spec.setup)) {
            fs::path run_dir = fs::path(spec.out_dir) / out.run_id;
            fs::create_directories(run_dir);
            save_checkpoints(run_dir, agents);
        }

        const std::string& id = out.run_id;
        runs << id << ',' << setup_name(out.setup) << ',' << seed << ',' << out.episodes_trained
             << ',' << (out.convergence_episode ? std::to_string(*out.convergence_episode) : "")
             << ',' << out.ledger.total(hier::Phase::kTraining) << ','
             << out.ledger.total(hier::Phase::kInference) << '\n';
        for (const auto& m : out.metrics) {
            metrics << id << ',' << setup_name(out.setup) << ',' << seed << ',' << m.eval_episode
                    << ',' << m.device << ',' << fmt_double(m.availability) << ','
                    << fmt_double(m.crossing_rate) << ',' << fmt_double(m.mean_uptime_s) << '\n';
        }
        aggregates << id << ',' << setup_name(out.setup) << ',' << seed << ','
                   << fmt_double(out.mean_availability()) << ','
                   << fmt_double(out.p5_availability()) << ','
                   << fmt_double(out.mean_crossing_rate()) << '\n';
        for (const auto& [key, c] : out.ledger.counters()) {
            signals << id << ',' << setup_name(out.setup) << ',' << seed << ',' << key.first << ','
                    << (key.second == 0 ? "training" : "inference") << ',' << c.to_gnb << ','
                    << c.from_gnb << '\n';
        }
        for (std::size_t ep = 0; ep < out.training_rewards.size(); ++ep) {
            rewards_csv << id << ',' << setup_name(out.setup) << ',' << seed << ",training," << ep
                        << ',' << fmt_double(out.training_rewards[ep]) << '\n';
        }
        for (std::size_t ep = 0; ep < out.eval_rewards.size(); ++ep) {
            rewards_csv << id << ',' << setup_name(out.setup) << ',' << seed << ",inference," << ep
                        << ',' << fmt_double(out.eval_rewards[ep]) << '\n';
        }

        if (spec.dump_traces) {
            fs::path run_dir = fs::path(spec.out_dir) / id;
            fs::create_directories(run_dir / "traces");
            for (std::size_t u = 0; u < out.sample_traces.size(); ++u) {
                std::ofstream tf(run_dir / "traces" / ("device_" + std::to_string(u) + ".csv"));
                kpi::write_trace_csv(tf, out.sample_traces[u]);
            }
        }
    }

    emit_plot_data(spec.out_dir);
}

void emit_plot_data(const std::string& metrics_dir)
{
    fs::path dir(metrics_dir);
    std::ifstream metrics(dir / "metrics.csv");
    if (!metrics) throw std::invalid_argument("missing metrics.csv in " + metrics_dir);
    std::string line;
    std::getline(metrics, line); // header
    std::map<std::string, std::vector<double>> avail_by_setup;
    std::map<std::string, std::vector<double>> crossing_by_setup;
    while (std::getline(metrics, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string part;
        while (std::getline(ss, part, ',')) f.push_back(part);
        if (f.size() < 8) throw std::invalid_argument("bad metrics row: " + line);
        avail_by_setup[f[1]].push_back(std::stod(f[5]));
        crossing_by_setup[f[1]].push_back(std::stod(f[6]));
    }

    fs::create_directories(dir / "plots");
    {
        std::ofstream out(dir / "plots" / "availability_cdf.csv");
        out << "setup,availability,cdf\n";
        for (auto& [setup, vals] : avail_by_setup) {
            std::sort(vals.begin(), vals.end());
            for (std::size_t i = 0; i < vals.size(); ++i) {
                out << setup << ',' << fmt_double(vals[i]) << ','
                    << fmt_double(static_cast<double>(i + 1) / static_cast<double>(vals.size()))
                    << '\n';
            }
        }
    }
    {
        std::ofstream out(dir / "plots" / "crossing_ccdf.csv");
        out << "setup,crossing_rate,ccdf\n";
        for (auto& [setup, vals] : crossing_by_setup) {
            std::sort(vals.begin(), vals.end());
            for (std::size_t i = 0; i < vals.size(); ++i) {
                out << setup << ',' << fmt_double(vals[i]) << ','
                    << fmt_double(static_cast<double>(vals.size() - i - 1) /
                                  static_cast<double>(vals.size()))
                    << '\n';
            }
        }
    }
    {
        std::ofstream out(dir / "plots" / "availability_stats.csv");
        out << "setup,mean,p5\n";
        for (auto& [setup, vals] : avail_by_setup) {
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            out << setup << ',' << fmt_double(mean) << ','
                << fmt_double(features::nearest_rank_percentile(vals, 5.0)) << '\n';
        }
    }
    {
        std::ifstream signals(dir / "signals.csv");
        std::ofstream out(dir / "plots" / "signal_totals.csv");
        out << "setup,phase,messages\n";
        if (signals) {
            std::getline(signals, line); // header
            std::map<std::pair<std::string, std::string>, std::int64_t> totals;
            while (std::getline(signals, line)) {
                if (line.empty()) continue;
                std::vector<std::string> f;
                std::stringstream ss(line);
                std::string part;
                while (std::getline(ss, part, ',')) f.push_back(part);
                if (f.size() < 7) throw std::invalid_argument("bad signals row: " + line);
                totals[{f[1], f[4]}] += std::stoll(f[5]) + std::stoll(f[6]);
            }
            for (const auto& [key, total] : totals) {
                out << key.first << ',' << key.second << ',' << total << '\n';
            }
        }
    }
}

} // namespace urllc::cli
