#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "crsim/errors.hpp"
#include "crsim/experiment.hpp"
#include "crsim/stub_agent.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitConfigError = 2;

int cmd_train(const std::string& dialogues, const std::string& diagram, double alpha,
              const std::string& out_dir) {
    auto diag = crsim::train_models(dialogues, diagram, alpha, out_dir);
    std::cout << "trained interaction models from " << diag.dialogues << " dialogues\n"
              << "  user actions:  " << diag.user_actions << "\n"
              << "  agent actions: " << diag.agent_actions << "\n"
              << "  CIR6 bigrams:  " << diag.cir6_bigrams << "\n"
              << "  QRFA triples:  " << diag.qrfa_triples << "\n"
              << "artifacts: " << out_dir << "/cir6.json, " << out_dir << "/qrfa.json\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> n, std::optional<std::string> out, bool oracle_nlu) {
    auto config = crsim::ExperimentConfig::load(config_path);
    if (seed) config.base_seed = *seed;
    if (n) config.n_dialogues = *n;
    if (out) config.out_dir = *out;
    if (oracle_nlu) config.oracle_nlu = true;
    auto result = crsim::run_experiment(config, std::cout);
    std::cout << "\n" << result.report.to_table() << "\n"
              << "outputs under " << config.out_dir.string() << "\n";
    return result.any_agent_errors ? kExitPartialFailure : kExitOk;
}

int cmd_metrics(const std::vector<std::string>& transcript_files, const std::string& reference,
                const std::string& config_path, std::optional<std::string> out) {
    std::vector<crsim::AgentEndpoint> agents;
    if (!config_path.empty()) {
        agents = crsim::ExperimentConfig::load(config_path).agents;
    }
    std::vector<std::filesystem::path> files(transcript_files.begin(), transcript_files.end());
    auto report = crsim::reanalyze(files, reference, agents);
    std::cout << report.to_table();
    if (out) {
        std::ofstream json_out(*out);
        json_out << report.to_json_string() << "\n";
    }
    return kExitOk;
}

int cmd_stub(const std::string& config_path, const std::string& transport,
             std::optional<std::uint64_t> seed) {
    auto spec = crsim::StubAgentSpec::load(config_path);
    if (seed) spec.seed = *seed;
    crsim::StubAgent agent(std::move(spec));
    if (transport == "stdio") {
        crsim::serve_stdio(agent);
        return kExitOk;
    }
    if (transport.rfind("tcp:", 0) == 0) {
        std::string rest = transport.substr(4);
        auto colon = rest.rfind(':');
        if (colon == std::string::npos) {
            throw crsim::ConfigError("tcp transport needs HOST:PORT");
        }
        int port = std::stoi(rest.substr(colon + 1));
        crsim::TcpListener listener(port);
        // Announce the bound port so callers can use port 0.
        std::cout << "listening on " << listener.port() << "\n" << std::flush;
        // Exit when the supervising process closes our stdin.
        std::thread watchdog([&listener]() {
            std::string line;
            while (std::getline(std::cin, line)) {
            }
            listener.close_listener();
            std::_Exit(kExitOk);
        });
        watchdog.detach();
        crsim::serve_tcp(agent, listener);
        return kExitOk;
    }
    throw crsim::ConfigError("unknown transport: " + transport);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation harness for evaluating conversational recommender agents"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Estimate interaction models from a corpus");
    std::string train_dialogues;
    std::string train_diagram;
    std::string train_out = "out/models";
    double train_alpha = crsim::kDefaultSmoothingAlpha;
    train->add_option("--dialogues", train_dialogues, "Annotated dialogue corpus (JSONL)")
        ->required();
    train->add_option("--diagram", train_diagram, "CIR6 state diagram file")->required();
    train->add_option("--alpha", train_alpha, "Add-alpha smoothing constant");
    train->add_option("--out", train_out, "Output directory for model artifacts");

    auto* run = app.add_subcommand("run", "Run simulation campaigns and report metrics");
    std::string run_config;
    std::optional<std::uint64_t> run_seed;
    std::optional<std::size_t> run_n;
    std::optional<std::string> run_out;
    bool run_oracle = false;
    run->add_option("--config", run_config, "Experiment config file")->required();
    run->add_option("--seed", run_seed, "Base seed override");
    run->add_option("--n", run_n, "Dialogues per campaign override");
    run->add_option("--out", run_out, "Output directory override");
    run->add_flag("--oracle-nlu", run_oracle, "Take agent actions from the wire, skip NLU");

    auto* metrics = app.add_subcommand("metrics", "Re-analyze saved transcripts");
    std::vector<std::string> metrics_files;
    std::string metrics_reference;
    std::string metrics_config;
    std::optional<std::string> metrics_out;
    metrics->add_option("--transcripts", metrics_files, "Transcript files (JSONL)")
        ->required()
        ->expected(-1);
    metrics->add_option("--reference", metrics_reference, "Reference dialogue corpus")
        ->required();
    metrics->add_option("--config", metrics_config,
                        "Experiment config supplying agent capabilities");
    metrics->add_option("--out", metrics_out, "Write the JSON report here");

    auto* stub = app.add_subcommand("stub", "Serve a stub agent");
    std::string stub_config;
    std::string stub_transport = "stdio";
    std::optional<std::uint64_t> stub_seed;
    stub->add_option("--config", stub_config, "Stub agent config file")->required();
    stub->add_option("--transport", stub_transport, "stdio or tcp:HOST:PORT");
    stub->add_option("--seed", stub_seed, "Seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (train->parsed()) {
            return cmd_train(train_dialogues, train_diagram, train_alpha, train_out);
        }
        if (run->parsed()) {
            return cmd_run(run_config, run_seed, run_n, run_out, run_oracle);
        }
        if (metrics->parsed()) {
            return cmd_metrics(metrics_files, metrics_reference, metrics_config, metrics_out);
        }
        if (stub->parsed()) {
            return cmd_stub(stub_config, stub_transport, stub_seed);
        }
    } catch (const crsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}
