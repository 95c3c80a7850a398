#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "crsim/engine.hpp"
#include "crsim/evaluation.hpp"

namespace crsim {

// Paths to the shipped configuration data one simulator run needs.
struct DataPaths {
    std::filesystem::path compatibility;
    std::filesystem::path cir6_diagram;
    std::filesystem::path user_templates;
    std::filesystem::path agent_index;
    std::filesystem::path catalog;
    std::filesystem::path ratings;
    std::filesystem::path reference_dialogues;
};

struct ExperimentConfig {
    DataPaths data;
    std::filesystem::path cir6_model;
    std::filesystem::path qrfa_model;
    std::vector<std::string> simulators;
    std::vector<AgentEndpoint> agents;
    std::size_t n_dialogues = 1;
    std::uint64_t base_seed = 0;
    int jobs = 1;
    int turn_cap = 50;
    double similarity_floor = kDefaultSimilarityFloor;
    bool oracle_nlu = false;
    std::filesystem::path out_dir;

    // Relative paths in the file resolve against its directory.
    static ExperimentConfig load(const std::filesystem::path& path);
    void validate() const;
};

struct TrainDiagnostics {
    std::size_t dialogues = 0;
    std::size_t user_actions = 0;
    std::size_t agent_actions = 0;
    std::size_t cir6_bigrams = 0;
    std::size_t qrfa_triples = 0;
};

// Estimates both interaction models from one annotated corpus and writes
// cir6.json / qrfa.json under out_dir. Nothing is written if estimation
// fails.
TrainDiagnostics train_models(const std::filesystem::path& dialogues_path,
                              const std::filesystem::path& diagram_path, double alpha,
                              const std::filesystem::path& out_dir);

SimulatorAssets load_assets(const DataPaths& data, const std::filesystem::path& cir6_model,
                            const std::filesystem::path& qrfa_model);

struct ExperimentResult {
    std::vector<TranscriptSet> sets;
    MetricsReport report;
    bool any_agent_errors = false;
};

// Runs every (simulator, agent) campaign, persists transcripts and the
// report under out_dir, and returns everything in memory.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log);

// Recomputes the report from previously saved transcript files.
MetricsReport reanalyze(const std::vector<std::filesystem::path>& transcript_files,
                        const std::filesystem::path& reference_dialogues,
                        const std::vector<AgentEndpoint>& agents);

}  // namespace crsim
