#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "urllc/experiment.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& csv)
{
    std::vector<std::uint64_t> seeds;
    std::string cur;
    std::stringstream ss(csv);
    while (std::getline(ss, cur, ',')) {
        if (cur.empty()) continue;
        seeds.push_back(std::stoull(cur));
    }
    if (seeds.empty()) throw std::invalid_argument("--seeds needs at least one seed");
    return seeds;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Factory-automation URLLC downlink simulator with two-timescale RL control"};

    std::string config_path;
    std::string setup = "maxretpwr";
    std::string seeds_csv = "1";
    std::string out_dir = "out";
    std::string gateway;
    std::string plots_dir;
    bool dump_traces = false;

    app.add_option("--config", config_path, "scenario config file (key=value lines)");
    app.add_option("--setup", setup,
                   "one of maxretpwr|rlavg|rlrisksen|hrlavg|hrlrisksen");
    app.add_option("--seeds", seeds_csv, "comma-separated run seeds, e.g. 0,1,2");
    app.add_option("--out", out_dir, "output directory for metrics and checkpoints");
    app.add_option("--gateway", gateway,
                   "host:port to listen on for external agents over the wire protocol");
    app.add_flag("--dump-traces", dump_traces, "write per-device service traces as CSV");
    app.add_option("--emit-plots", plots_dir,
                   "regenerate plot CSVs from an existing output directory and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!plots_dir.empty()) {
            urllc::cli::emit_plot_data(plots_dir);
            return 0;
        }

        urllc::cli::ExperimentSpec spec;
        spec.cfg = config_path.empty()
                       ? urllc::config::ExperimentConfig{}
                       : urllc::config::ExperimentConfig::from_file(config_path);
        spec.cfg.validate();
        spec.setup = urllc::cli::parse_setup(setup);
        spec.seeds = parse_seeds(seeds_csv);
        spec.out_dir = out_dir;
        spec.dump_traces = dump_traces;
        spec.gateway_endpoint = gateway;
        urllc::cli::run_experiment(spec);
        return 0;
    } catch (const std::exception& e) {
        nlohmann::json errors = nlohmann::json::array();
        errors.push_back({{"error", e.what()}});
        std::cerr << errors.dump() << '\n';
        return 2;
    }
}
