#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "urllc/config.hpp"
#include "urllc/experiment.hpp"

using namespace urllc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() /
               ("urllc_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

config::ExperimentConfig tiny_config()
{
    config::ExperimentConfig cfg;
    cfg.scenario.episode_s = 1.0;
    cfg.eval_episodes = 2;
    cfg.episode_budget = 2;
    return cfg;
}

} // namespace

TEST_CASE("config parsing: keys, comments, and errors")
{
    std::istringstream in(
        "# a comment\n"
        "delay_bound_s = 0.0025\n"
        "power_levels_w=0.008,0.02\n"
        "retx_levels = 1,2\n"
        "omega=0.4   # inline comment\n"
        "reward_mode=average\n"
        "\n");
    auto cfg = config::ExperimentConfig::from_stream(in);
    CHECK(cfg.scenario.delay_bound_s == 0.0025);
    CHECK(cfg.reward.omega == 0.4);
    CHECK(cfg.reward.mode == rewards::Mode::kAverage);

    std::istringstream unknown("no_such_key=1\n");
    CHECK_THROWS_WITH_AS(config::ExperimentConfig::from_stream(unknown),
                         doctest::Contains("no_such_key"), std::invalid_argument);
    std::istringstream bad_value("omega=bananas\n");
    CHECK_THROWS_WITH_AS(config::ExperimentConfig::from_stream(bad_value),
                         doctest::Contains("omega"), std::invalid_argument);
    std::istringstream bad_line("omega\n");
    CHECK_THROWS(config::ExperimentConfig::from_stream(bad_line));
    std::istringstream invalid("omega=1.5\n");
    CHECK_THROWS(config::ExperimentConfig::from_stream(invalid));
}

TEST_CASE("resolved config round-trips to an identical configuration")
{
    config::ExperimentConfig cfg;
    cfg.scenario.rng_seed = 99;
    cfg.reward.omega = 0.37;
    cfg.hyper.hidden = {64, 32};
    std::ostringstream out;
    cfg.write_resolved(out);
    std::istringstream in(out.str());
    auto back = config::ExperimentConfig::from_stream(in);
    std::ostringstream out2;
    back.write_resolved(out2);
    CHECK(out.str() == out2.str());
}

TEST_CASE("maxretpwr runs produce deterministic, message-free outputs")
{
    auto cfg = tiny_config();
    auto a = cli::run_single(cfg, cli::Setup::kMaxRetPwr, 0);
    auto b = cli::run_single(cfg, cli::Setup::kMaxRetPwr, 0);
    CHECK(a.metrics.size() == 2 * 10);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        CHECK(a.metrics[i].availability == b.metrics[i].availability);
        CHECK(a.metrics[i].crossing_rate == b.metrics[i].crossing_rate);
    }
    CHECK(a.ledger.total() == 0);
    CHECK(a.episodes_trained == 0);
    CHECK(a.training_rewards.empty());
}

TEST_CASE("run_experiment writes the output files and plot data")
{
    TempDir tmp;
    cli::ExperimentSpec spec;
    spec.cfg = tiny_config();
    spec.setup = cli::Setup::kMaxRetPwr;
    spec.seeds = {0, 1};
    spec.out_dir = (tmp.path / "out").string();
    spec.dump_traces = true;
    cli::run_experiment(spec);

    for (const char* name : {"resolved_config.txt", "runs.csv", "metrics.csv", "aggregates.csv",
                             "signals.csv", "rewards.csv"}) {
        CHECK(fs::exists(fs::path(spec.out_dir) / name));
    }
    CHECK(fs::exists(fs::path(spec.out_dir) / "plots" / "availability_cdf.csv"));
    CHECK(fs::exists(fs::path(spec.out_dir) / "maxretpwr_seed0" / "traces" / "device_0.csv"));

    // two runs of the same spec produce identical metrics byte for byte
    cli::ExperimentSpec spec2 = spec;
    spec2.out_dir = (tmp.path / "out2").string();
    cli::run_experiment(spec2);
    CHECK(slurp(fs::path(spec.out_dir) / "metrics.csv") ==
          slurp(fs::path(spec2.out_dir) / "metrics.csv"));

    // signals.csv carries no rows for the baseline (header only)
    auto signals = slurp(fs::path(spec.out_dir) / "signals.csv");
    CHECK(signals == "run,setup,seed,agent,phase,to_gnb,from_gnb\n");
}

TEST_CASE("emit_plot_data matches a hand-computed empirical CDF")
{
    TempDir tmp;
    fs::path dir = tmp.path / "metrics";
    fs::create_directories(dir);
    {
        std::ofstream m(dir / "metrics.csv");
        m << "run,setup,seed,eval_episode,device,availability,crossing_rate,mean_uptime_s\n";
        const double avail[10] = {0.91, 0.99, 0.95, 1.0, 0.97, 0.93, 1.0, 0.98, 0.96, 0.94};
        for (int i = 0; i < 10; ++i) {
            m << "r,setupA,0,0," << i << ',' << avail[i] << ",0.5,1\n";
        }
        std::ofstream s(dir / "signals.csv");
        s << "run,setup,seed,agent,phase,to_gnb,from_gnb\n";
        s << "r,setupA,0,flat,training,100,100\n";
        s << "r,setupA,0,flat,inference,10,10\n";
    }
    cli::emit_plot_data(dir.string());

    // hand-computed empirical CDF: sorted values, cdf_i = (i+1)/10
    const double sorted[10] = {0.91, 0.93, 0.94, 0.95, 0.96, 0.97, 0.98, 0.99, 1.0, 1.0};
    std::ifstream cdf(dir / "plots" / "availability_cdf.csv");
    std::string line;
    std::getline(cdf, line);
    CHECK(line == "setup,availability,cdf");
    for (int i = 0; i < 10; ++i) {
        REQUIRE(std::getline(cdf, line));
        auto c1 = line.find(','), c2 = line.rfind(',');
        CHECK(line.substr(0, c1) == "setupA");
        CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == doctest::Approx(sorted[i]));
        CHECK(std::stod(line.substr(c2 + 1)) == doctest::Approx((i + 1) / 10.0).epsilon(1e-15));
    }

    std::ifstream stats(dir / "plots" / "availability_stats.csv");
    std::getline(stats, line);
    REQUIRE(std::getline(stats, line));
    auto c1 = line.find(','), c2 = line.rfind(',');
    // mean of the ten values is 0.963, p5 (nearest rank of 10) is the minimum
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == doctest::Approx(0.963).epsilon(1e-12));
    CHECK(std::stod(line.substr(c2 + 1)) == doctest::Approx(0.91));

    auto totals = slurp(dir / "plots" / "signal_totals.csv");
    CHECK(totals.find("setupA,training,200\n") != std::string::npos);
    CHECK(totals.find("setupA,inference,20\n") != std::string::npos);
}

TEST_CASE("setup names map to frameworks and reward modes")
{
    CHECK(cli::parse_setup("hrlrisksen") == cli::Setup::kHrlRiskSen);
    CHECK_THROWS(cli::parse_setup("warpdrive"));
    CHECK(cli::framework_of(cli::Setup::kRlAvg) == hier::Framework::kFlatRl);
    CHECK(cli::framework_of(cli::Setup::kHrlAvg) == hier::Framework::kHrl);
    CHECK_FALSE(cli::is_learning(cli::Setup::kMaxRetPwr));
    CHECK(cli::reward_mode_of(cli::Setup::kRlRiskSen) == rewards::Mode::kRiskSensitive);
    CHECK(cli::reward_mode_of(cli::Setup::kHrlAvg) == rewards::Mode::kAverage);
    CHECK_FALSE(cli::reward_mode_of(cli::Setup::kMaxRetPwr).has_value());
}
