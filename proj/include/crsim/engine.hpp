#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crsim/capabilities.hpp"
#include "crsim/compatibility.hpp"
#include "crsim/corpus.hpp"
#include "crsim/interaction.hpp"
#include "crsim/nlg.hpp"
#include "crsim/nlu.hpp"
#include "crsim/preference.hpp"
#include "crsim/transcript.hpp"
#include "crsim/transition_model.hpp"
#include "crsim/transport.hpp"

namespace crsim {

enum class PreferenceModelKind { Single, Pkg };

std::string_view label(PreferenceModelKind kind);

// One of the three supported simulator configurations: QRFA-Single,
// CIR6-Single, CIR6-PKG.
struct SimulatorConfig {
    InteractionModelKind interaction = InteractionModelKind::Cir6;
    PreferenceModelKind preference = PreferenceModelKind::Single;
    int turn_cap = 50;
    double similarity_floor = kDefaultSimilarityFloor;
    bool oracle_nlu = false;
    bool agent_opens = false;
    std::string consumed_notice = "I have already seen <ITEM>.";

    std::string name() const;
    // QRFA pairs only with the single-item preference model.
    void validate() const;
};

SimulatorConfig parse_simulator_config(std::string_view name);

// Read-only material shared by every dialogue of a campaign.
struct SimulatorAssets {
    CompatibilityTable compatibility;
    TransitionModel cir6_model;
    TransitionModel qrfa_model;
    TemplateBank user_bank{Speaker::User};
    LabeledUtteranceIndex agent_index{Speaker::Agent};
    ItemCatalog catalog;
    EntityCatalog entities;
    RatingsCorpus ratings;

    const TransitionModel& model_for(InteractionModelKind kind) const {
        return kind == InteractionModelKind::Cir6 ? cir6_model : qrfa_model;
    }
};

struct AgentEndpoint {
    enum class TransportKind { Stdio, Tcp, Callback };

    std::string name;
    TransportKind transport = TransportKind::Stdio;
    std::vector<std::string> argv;  // stdio command line
    std::string host = "127.0.0.1";
    int port = 0;
    double timeout_seconds = 10.0;
    CapabilitySet capabilities;
    CallbackTransport::Handler callback;  // in-process agents for tests

    void validate() const;
};

DialogueTranscript run_dialogue(const SimulatorConfig& config, const SimulatorAssets& assets,
                                AgentTransport& transport, const std::string& conversation_id,
                                std::uint64_t seed, const std::string& agent_name,
                                double timeout_seconds = 10.0);

struct CampaignOptions {
    std::size_t n_dialogues = 0;
    std::uint64_t base_seed = 0;
    // Concurrent dialogue workers; honored for per-conversation transports
    // (TCP, callback), forced to 1 for a shared stdio child.
    int jobs = 1;
};

// n independent dialogues with derived seeds (base + index). Per-dialogue
// agent failures become AGENT_ERROR transcripts; the campaign continues.
std::vector<DialogueTranscript> run_campaign(const SimulatorConfig& config,
                                             const SimulatorAssets& assets,
                                             const AgentEndpoint& endpoint,
                                             const CampaignOptions& options);

}  // namespace crsim
