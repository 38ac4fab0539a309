// Minimal external agent: connects to a simulator gateway and answers every
// state with a fixed action vector. Handy for smoke-testing the wire
// protocol and for driving baseline policies from a separate process.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "urllc/gateway.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Fixed-policy agent for the simulator gateway"};

    std::string endpoint = "127.0.0.1:5555";
    std::string agent_id = "flat";
    std::string values_csv;

    app.add_option("--connect", endpoint, "simulator gateway endpoint (host:port)");
    app.add_option("--agent-id", agent_id, "agent id announced in the hello message");
    app.add_option("--values", values_csv, "comma-separated action values to repeat")->required();

    CLI11_PARSE(app, argc, argv);

    std::vector<double> values;
    {
        std::stringstream ss(values_csv);
        std::string part;
        while (std::getline(ss, part, ',')) values.push_back(std::stod(part));
    }
    if (values.empty()) {
        std::cerr << "--values must carry at least one value\n";
        return 2;
    }

    try {
        urllc::gateway::serve_agent(endpoint, agent_id,
                                    [&](std::int64_t, const std::vector<double>&,
                                        std::optional<double>) { return values; });
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
}
