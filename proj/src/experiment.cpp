#include "crsim/experiment.hpp"

#include <fstream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "crsim/errors.hpp"

namespace crsim {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

AgentEndpoint parse_endpoint(const json& j, const std::filesystem::path& base) {
    AgentEndpoint endpoint;
    endpoint.name = j.at("name").get<std::string>();
    std::string transport = j.at("transport").get<std::string>();
    if (transport == "stdio") {
        endpoint.transport = AgentEndpoint::TransportKind::Stdio;
        for (const auto& arg : j.at("command")) {
            endpoint.argv.push_back(arg.get<std::string>());
        }
        if (!endpoint.argv.empty()) {
            // Resolve a relative executable path against the config file.
            std::filesystem::path exe(endpoint.argv[0]);
            if (!exe.is_absolute() && exe.string().find('/') != std::string::npos) {
                endpoint.argv[0] = (base / exe).string();
            }
        }
    } else if (transport.rfind("tcp:", 0) == 0) {
        endpoint.transport = AgentEndpoint::TransportKind::Tcp;
        std::string rest = transport.substr(4);
        auto colon = rest.rfind(':');
        if (colon == std::string::npos) {
            throw ConfigError("tcp transport needs HOST:PORT, got: " + transport);
        }
        endpoint.host = rest.substr(0, colon);
        endpoint.port = std::stoi(rest.substr(colon + 1));
    } else {
        throw ConfigError("unknown transport: " + transport);
    }
    endpoint.timeout_seconds = j.value("timeout_s", 10.0);
    for (const auto& c : j.at("capabilities")) {
        endpoint.capabilities.insert(parse_capability(c.get<std::string>()));
    }
    endpoint.validate();
    return endpoint;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("bad experiment config: " + std::string(e.what()));
    }
    const auto base = path.parent_path();
    ExperimentConfig config;
    try {
        const auto& data = j.at("data");
        config.data.compatibility = resolve(base, data.at("compatibility").get<std::string>());
        config.data.cir6_diagram = resolve(base, data.at("cir6_diagram").get<std::string>());
        config.data.user_templates = resolve(base, data.at("user_templates").get<std::string>());
        config.data.agent_index = resolve(base, data.at("agent_index").get<std::string>());
        config.data.catalog = resolve(base, data.at("catalog").get<std::string>());
        config.data.ratings = resolve(base, data.at("ratings").get<std::string>());
        config.data.reference_dialogues =
            resolve(base, data.at("reference_dialogues").get<std::string>());
        config.cir6_model = resolve(base, j.at("models").at("cir6").get<std::string>());
        config.qrfa_model = resolve(base, j.at("models").at("qrfa").get<std::string>());
        for (const auto& s : j.at("simulators")) {
            config.simulators.push_back(s.get<std::string>());
        }
        for (const auto& a : j.at("agents")) {
            config.agents.push_back(parse_endpoint(a, base));
        }
        config.n_dialogues = j.at("n_dialogues").get<std::size_t>();
        config.base_seed = j.value("base_seed", 0ull);
        config.jobs = j.value("jobs", 1);
        config.turn_cap = j.value("turn_cap", 50);
        config.similarity_floor = j.value("similarity_floor", kDefaultSimilarityFloor);
        config.oracle_nlu = j.value("oracle_nlu", false);
        config.out_dir = resolve(base, j.value("out", "out"));
    } catch (const json::exception& e) {
        throw ConfigError("experiment config violates schema: " + std::string(e.what()));
    }
    config.validate();
    return config;
}

void ExperimentConfig::validate() const {
    if (n_dialogues == 0) throw ConfigError("n_dialogues must be at least 1");
    if (simulators.empty()) throw ConfigError("no simulator configurations selected");
    if (agents.empty()) throw ConfigError("no agent endpoints configured");
    for (const auto& name : simulators) parse_simulator_config(name);
    for (const auto& p :
         {data.compatibility, data.cir6_diagram, data.user_templates, data.agent_index,
          data.catalog, data.ratings, data.reference_dialogues}) {
        if (!std::filesystem::exists(p)) {
            throw ConfigError("referenced file does not exist: " + p.string());
        }
    }
}

TrainDiagnostics train_models(const std::filesystem::path& dialogues_path,
                              const std::filesystem::path& diagram_path, double alpha,
                              const std::filesystem::path& out_dir) {
    AnnotatedDialogueCorpus corpus = load_dialogues(dialogues_path);
    Cir6StateDiagram diagram = Cir6StateDiagram::load(diagram_path);
    TransitionModel cir6 = estimate_cir6(corpus, diagram, alpha);
    TransitionModel qrfa = estimate_qrfa(corpus, alpha);

    std::filesystem::create_directories(out_dir);
    // Write-then-rename keeps a failed run from leaving partial artifacts.
    auto save_atomic = [&](const TransitionModel& model, const std::string& name) {
        auto tmp = out_dir / (name + ".tmp");
        auto final_path = out_dir / name;
        model.save(tmp);
        std::filesystem::rename(tmp, final_path);
    };
    save_atomic(cir6, "cir6.json");
    save_atomic(qrfa, "qrfa.json");

    TrainDiagnostics diag;
    diag.dialogues = corpus.dialogues.size();
    for (const auto& dialogue : corpus.dialogues) {
        for (const auto& turn : dialogue.turns) {
            if (turn.speaker == Speaker::User) {
                diag.user_actions += turn.actions.size();
            } else {
                diag.agent_actions += turn.actions.size();
            }
        }
    }
    for (const auto& row : cir6.cir6_bigrams) {
        for (auto c : row) diag.cir6_bigrams += c;
    }
    for (const auto& row : qrfa.agent_given_class) {
        for (auto c : row) diag.qrfa_triples += c;
    }
    return diag;
}

SimulatorAssets load_assets(const DataPaths& data, const std::filesystem::path& cir6_model,
                            const std::filesystem::path& qrfa_model) {
    SimulatorAssets assets;
    assets.compatibility = CompatibilityTable::load(data.compatibility);
    assets.cir6_model = TransitionModel::load(cir6_model);
    assets.qrfa_model = TransitionModel::load(qrfa_model);
    if (!assets.cir6_model.diagram) {
        assets.cir6_model.diagram = Cir6StateDiagram::load(data.cir6_diagram);
    }
    assets.user_bank = TemplateBank::load(data.user_templates, Speaker::User);
    assets.user_bank.validate_full_coverage();
    assets.agent_index = LabeledUtteranceIndex::load(data.agent_index, Speaker::Agent);
    assets.catalog = ItemCatalog::load(data.catalog);
    assets.entities = EntityCatalog::from_items(assets.catalog);
    assets.ratings = load_ratings(data.ratings, data.catalog);
    return assets;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
    SimulatorAssets assets = load_assets(config.data, config.cir6_model, config.qrfa_model);
    AnnotatedDialogueCorpus reference = load_dialogues(config.data.reference_dialogues);
    ActionDistribution reference_dist = distribution_from_corpus(reference);

    std::filesystem::create_directories(config.out_dir);

    ExperimentResult result;
    for (const auto& simulator_name : config.simulators) {
        SimulatorConfig sim = parse_simulator_config(simulator_name);
        sim.turn_cap = config.turn_cap;
        sim.similarity_floor = config.similarity_floor;
        sim.oracle_nlu = config.oracle_nlu;
        for (const auto& endpoint : config.agents) {
            CampaignOptions options;
            options.n_dialogues = config.n_dialogues;
            options.base_seed = config.base_seed;
            options.jobs = config.jobs;
            log << "running " << simulator_name << " vs " << endpoint.name << " ("
                << config.n_dialogues << " dialogues)\n";
            TranscriptSet set;
            set.agent = endpoint.name;
            set.simulator = simulator_name;
            set.capabilities = endpoint.capabilities;
            set.transcripts = run_campaign(sim, assets, endpoint, options);
            for (const auto& t : set.transcripts) {
                if (t.status == TerminalStatus::AgentError) result.any_agent_errors = true;
            }
            auto file = config.out_dir /
                        (endpoint.name + "-" + simulator_name + ".transcripts.jsonl");
            save_transcripts(set.transcripts, file);
            result.sets.push_back(std::move(set));
        }
    }

    result.report = build_report(result.sets, reference_dist);
    {
        std::ofstream json_out(config.out_dir / "report.json");
        json_out << result.report.to_json_string() << "\n";
        std::ofstream table_out(config.out_dir / "report.txt");
        table_out << result.report.to_table();
    }
    return result;
}

MetricsReport reanalyze(const std::vector<std::filesystem::path>& transcript_files,
                        const std::filesystem::path& reference_dialogues,
                        const std::vector<AgentEndpoint>& agents) {
    std::map<std::string, CapabilitySet> capabilities;
    for (const auto& a : agents) capabilities[a.name] = a.capabilities;

    std::map<std::pair<std::string, std::string>, TranscriptSet> sets;
    for (const auto& file : transcript_files) {
        for (auto& t : load_transcripts(file)) {
            auto key = std::make_pair(t.agent_name, t.simulator_name);
            auto& set = sets[key];
            set.agent = t.agent_name;
            set.simulator = t.simulator_name;
            auto it = capabilities.find(t.agent_name);
            set.capabilities = it != capabilities.end() ? it->second : all_capabilities();
            set.transcripts.push_back(std::move(t));
        }
    }
    AnnotatedDialogueCorpus reference = load_dialogues(reference_dialogues);
    std::vector<TranscriptSet> ordered;
    for (auto& [key, set] : sets) ordered.push_back(std::move(set));
    return build_report(ordered, distribution_from_corpus(reference));
}

}  // namespace crsim
