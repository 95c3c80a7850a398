#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "crsim/engine.hpp"
#include "crsim/errors.hpp"
#include "crsim/evaluation.hpp"
#include "crsim/experiment.hpp"
#include "crsim/stub_agent.hpp"
#include "crsim/transition_model.hpp"
#include "crsim/transport.hpp"
#include "crsim/wire.hpp"

#include "helpers.hpp"

using namespace crsim;
using namespace crsim::testing;

namespace {

int run_cli(const std::string& args) {
    std::string command = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

StubAgentSpec local_stub_spec(StubPolicy policy, double p) {
    StubAgentSpec spec;
    spec.policy = policy;
    spec.flaky_p = p;
    spec.seed = 11;
    spec.recommendation_pool = {"m21", "m22"};
    spec.compatibility_path = data_dir() / "compatibility.txt";
    spec.user_templates_path = data_dir() / "user_templates.tsv";
    spec.agent_templates_path = data_dir() / "agent_templates.tsv";
    spec.catalog_path = data_dir() / "catalog.csv";
    return spec;
}

SimulatorAssets load_demo_assets(const std::filesystem::path& models_dir) {
    DataPaths data;
    data.compatibility = data_dir() / "compatibility.txt";
    data.cir6_diagram = data_dir() / "cir6_diagram.txt";
    data.user_templates = data_dir() / "user_templates.tsv";
    data.agent_index = data_dir() / "agent_nlu_index.tsv";
    data.catalog = data_dir() / "catalog.csv";
    data.ratings = data_dir() / "ratings.csv";
    data.reference_dialogues = data_dir() / "dialogues.jsonl";
    return load_assets(data, models_dir / "cir6.json", models_dir / "qrfa.json");
}

}  // namespace

TEST_CASE("cli train persists models that reload identically") {
    TempDir tmp("train");
    std::string out = (tmp.path / "models").string();
    int exit_code = run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                            " --diagram " + (data_dir() / "cir6_diagram.txt").string() +
                            " --out " + out);
    REQUIRE(exit_code == 0);

    auto corpus = load_dialogues(data_dir() / "dialogues.jsonl");
    auto diagram = Cir6StateDiagram::load(data_dir() / "cir6_diagram.txt");
    auto expected_cir6 = estimate_cir6(corpus, diagram);
    auto expected_qrfa = estimate_qrfa(corpus);
    CHECK(TransitionModel::load(tmp.path / "models" / "cir6.json") == expected_cir6);
    CHECK(TransitionModel::load(tmp.path / "models" / "qrfa.json") == expected_qrfa);

    // Retraining writes bitwise-identical artifacts.
    std::string before = read_file(tmp.path / "models" / "cir6.json");
    REQUIRE(run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                    " --diagram " + (data_dir() / "cir6_diagram.txt").string() + " --out " +
                    out) == 0);
    CHECK(read_file(tmp.path / "models" / "cir6.json") == before);
}

TEST_CASE("cli train fails cleanly on a corrupt corpus") {
    TempDir tmp("train_bad");
    write_file(tmp.path / "bad.jsonl",
               R"({"dialogue_id":"d1","turns":[{"speaker":"USER","utterance":"x","actions":["Elict"]}]})"
               "\n");
    std::string out = (tmp.path / "models").string();
    int exit_code = run_cli("train --dialogues " + (tmp.path / "bad.jsonl").string() +
                            " --diagram " + (data_dir() / "cir6_diagram.txt").string() +
                            " --out " + out);
    CHECK(exit_code == 2);
    CHECK_FALSE(std::filesystem::exists(tmp.path / "models" / "cir6.json"));
    CHECK_FALSE(std::filesystem::exists(tmp.path / "models" / "qrfa.json"));
}

TEST_CASE("stub subprocess speaks the wire protocol and survives bad input") {
    TempDir tmp("stub_proto");
    write_file(tmp.path / "stub.json", R"({
      "policy": "PERFECT",
      "seed": 5,
      "recommendation_pool": ["m21"],
      "data": {
        "compatibility": ")" + (data_dir() / "compatibility.txt").string() + R"(",
        "user_templates": ")" + (data_dir() / "user_templates.tsv").string() + R"(",
        "agent_templates": ")" + (data_dir() / "agent_templates.tsv").string() + R"(",
        "catalog": ")" + (data_dir() / "catalog.csv").string() + R"("
      }
    })");

    SubprocessTransport stub({cli_path(), "stub", "--config", (tmp.path / "stub.json").string()});

    AgentRequest request{"conv-1", 0, "What movies can you recommend?"};
    auto reply = stub.exchange(encode_request(request), 10.0);
    REQUIRE(reply.has_value());
    auto response = decode_response(*reply);
    CHECK(!response.utterance.empty());
    REQUIRE(response.actions.has_value());
    REQUIRE(response.actions->size() == 1);
    // A compatible answer to Inquire.List.
    auto table = CompatibilityTable::load(data_dir() / "compatibility.txt");
    CHECK(table.compatible(UserActionKind::InquireList,
                           parse_agent_action(response.actions->front())));

    // Malformed request: protocol error response, process stays alive.
    auto error_reply = stub.exchange("this is not json", 10.0);
    REQUIRE(error_reply.has_value());
    auto error_response = decode_response(*error_reply);
    CHECK(error_response.utterance.find("ERROR") != std::string::npos);

    auto after = stub.exchange(encode_request(request), 10.0);
    REQUIRE(after.has_value());
    CHECK(stub.running());
}

TEST_CASE("perfect stub yields success rate 1.0 through full NLU") {
    TempDir tmp("perfect_campaign");
    REQUIRE(run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                    " --diagram " + (data_dir() / "cir6_diagram.txt").string() + " --out " +
                    (tmp.path / "models").string()) == 0);
    auto assets = load_demo_assets(tmp.path / "models");

    AgentEndpoint endpoint;
    endpoint.name = "A";
    endpoint.transport = AgentEndpoint::TransportKind::Stdio;
    endpoint.capabilities = all_capabilities();
    endpoint.argv = {cli_path(), "stub", "--config",
                     (data_dir() / "stub_perfect.json").string()};

    CampaignOptions options;
    options.n_dialogues = 20;
    options.base_seed = 2024;
    for (const char* sim : {"CIR6-Single", "QRFA-Single", "CIR6-PKG"}) {
        auto runs = run_campaign(parse_simulator_config(sim), assets, endpoint, options);
        CHECK(success_rate(runs) == doctest::Approx(1.0));
        for (const auto& t : runs) CHECK(t.status == TerminalStatus::Completed);
    }
}

TEST_CASE("flaky stub lands near its design point") {
    TempDir tmp("flaky_campaign");
    REQUIRE(run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                    " --diagram " + (data_dir() / "cir6_diagram.txt").string() + " --out " +
                    (tmp.path / "models").string()) == 0);
    auto assets = load_demo_assets(tmp.path / "models");

    StubAgent agent(local_stub_spec(StubPolicy::Flaky, 0.8));
    AgentEndpoint endpoint;
    endpoint.name = "B";
    endpoint.transport = AgentEndpoint::TransportKind::Callback;
    endpoint.capabilities = all_capabilities();
    endpoint.callback = [&agent](const std::string& line) {
        return std::optional(agent.handle_line(line));
    };

    CampaignOptions options;
    options.n_dialogues = 100;
    options.base_seed = 31;
    auto runs = run_campaign(parse_simulator_config("CIR6-Single"), assets, endpoint, options);
    double rate = success_rate(runs);
    CHECK(rate > 0.75);
    CHECK(rate < 0.85);
}

TEST_CASE("scripted stub with an empty Inquire response fails those turns") {
    TempDir tmp("scripted");
    REQUIRE(run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                    " --diagram " + (data_dir() / "cir6_diagram.txt").string() + " --out " +
                    (tmp.path / "models").string()) == 0);
    auto assets = load_demo_assets(tmp.path / "models");
    auto table = CompatibilityTable::load(data_dir() / "compatibility.txt");

    StubAgentSpec spec = local_stub_spec(StubPolicy::Scripted, 1.0);
    for (UserActionKind kind : kAllUserActions) {
        std::string key(label(kind));
        if (cir6_main(kind) == Cir6Main::Inquire) {
            spec.scripted[key] = "";  // unintelligible reply
        } else {
            spec.scripted[key] =
                std::string(label(table.compatible_responses(kind).front()));
        }
    }
    StubAgent agent(std::move(spec));
    AgentEndpoint endpoint;
    endpoint.name = "S";
    endpoint.transport = AgentEndpoint::TransportKind::Callback;
    endpoint.capabilities = all_capabilities();
    endpoint.callback = [&agent](const std::string& line) {
        return std::optional(agent.handle_line(line));
    };

    CampaignOptions options;
    options.n_dialogues = 25;
    options.base_seed = 8;
    auto runs = run_campaign(parse_simulator_config("CIR6-Single"), assets, endpoint, options);
    std::size_t inquire_turns = 0;
    for (const auto& t : runs) {
        const TranscriptTurn* previous_user = nullptr;
        for (const auto& turn : t.turns) {
            if (turn.speaker == Speaker::User) {
                previous_user = &turn;
                continue;
            }
            if (!previous_user) continue;
            auto kind = parse_user_action(previous_user->actions.front());
            if (cir6_main(kind) == Cir6Main::Inquire) {
                ++inquire_turns;
                CHECK_FALSE(*turn.goal_satisfied);
            } else {
                CHECK(*turn.goal_satisfied);
            }
        }
    }
    CHECK(inquire_turns > 0);
}

TEST_CASE("tcp transport serves concurrent conversations") {
    StubAgent agent(local_stub_spec(StubPolicy::Perfect, 1.0));
    TcpListener listener(0);
    int port = listener.port();
    std::thread server([&]() { serve_tcp(agent, listener); });

    TempDir tmp("tcp_campaign");
    REQUIRE(run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                    " --diagram " + (data_dir() / "cir6_diagram.txt").string() + " --out " +
                    (tmp.path / "models").string()) == 0);
    auto assets = load_demo_assets(tmp.path / "models");

    AgentEndpoint endpoint;
    endpoint.name = "T";
    endpoint.transport = AgentEndpoint::TransportKind::Tcp;
    endpoint.host = "127.0.0.1";
    endpoint.port = port;
    endpoint.capabilities = all_capabilities();

    CampaignOptions sequential;
    sequential.n_dialogues = 12;
    sequential.base_seed = 600;
    auto first = run_campaign(parse_simulator_config("CIR6-Single"), assets, endpoint, sequential);
    CHECK(success_rate(first) == doctest::Approx(1.0));

    CampaignOptions parallel = sequential;
    parallel.jobs = 4;
    auto second = run_campaign(parse_simulator_config("CIR6-Single"), assets, endpoint, parallel);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(to_json_line(first[i]) == to_json_line(second[i]));
    }

    listener.close_listener();
    server.join();
}

TEST_CASE("cli stub serves tcp and announces its port") {
    TempDir tmp("cli_tcp");
    write_file(tmp.path / "stub.json", R"({
      "policy": "PERFECT",
      "seed": 5,
      "data": {
        "compatibility": ")" + (data_dir() / "compatibility.txt").string() + R"(",
        "user_templates": ")" + (data_dir() / "user_templates.tsv").string() + R"(",
        "agent_templates": ")" + (data_dir() / "agent_templates.tsv").string() + R"(",
        "catalog": ")" + (data_dir() / "catalog.csv").string() + R"("
      }
    })");
    SubprocessTransport stub_process({cli_path(), "stub", "--config",
                                      (tmp.path / "stub.json").string(), "--transport",
                                      "tcp:127.0.0.1:0"});
    // The first line on stdout announces the bound port.
    auto announce = stub_process.exchange("", 10.0);
    REQUIRE(announce.has_value());
    auto space = announce->rfind(' ');
    REQUIRE(space != std::string::npos);
    int port = std::stoi(announce->substr(space + 1));

    TcpTransport tcp("127.0.0.1", port);
    auto reply = tcp.exchange(encode_request({"c1", 0, "Show me more options."}), 10.0);
    REQUIRE(reply.has_value());
    auto response = decode_response(*reply);
    REQUIRE(response.actions.has_value());
    auto table = CompatibilityTable::load(data_dir() / "compatibility.txt");
    CHECK(table.compatible(UserActionKind::NavigateMore,
                           parse_agent_action(response.actions->front())));
}

TEST_CASE("experiment config validation drives cli exit codes") {
    TempDir tmp("exp_codes");
    // Unparseable config file.
    write_file(tmp.path / "broken.json", "{ nope");
    CHECK(run_cli("run --config " + (tmp.path / "broken.json").string()) == 2);

    // Unreachable TCP endpoint: campaign completes with AGENT_ERROR
    // transcripts and exit code 1.
    REQUIRE(run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                    " --diagram " + (data_dir() / "cir6_diagram.txt").string() + " --out " +
                    (tmp.path / "models").string()) == 0);
    write_file(tmp.path / "exp.json", R"({
      "data": {
        "compatibility": ")" + (data_dir() / "compatibility.txt").string() + R"(",
        "cir6_diagram": ")" + (data_dir() / "cir6_diagram.txt").string() + R"(",
        "user_templates": ")" + (data_dir() / "user_templates.tsv").string() + R"(",
        "agent_index": ")" + (data_dir() / "agent_nlu_index.tsv").string() + R"(",
        "catalog": ")" + (data_dir() / "catalog.csv").string() + R"(",
        "ratings": ")" + (data_dir() / "ratings.csv").string() + R"(",
        "reference_dialogues": ")" + (data_dir() / "dialogues.jsonl").string() + R"("
      },
      "models": {"cir6": "models/cir6.json", "qrfa": "models/qrfa.json"},
      "simulators": ["CIR6-Single"],
      "agents": [{
        "name": "Dead",
        "transport": "tcp:127.0.0.1:9",
        "capabilities": ["Disclose"]
      }],
      "n_dialogues": 2,
      "base_seed": 1,
      "out": "run_out"
    })");
    CHECK(run_cli("run --config " + (tmp.path / "exp.json").string()) == 1);
    auto saved = load_transcripts(tmp.path / "run_out" / "Dead-CIR6-Single.transcripts.jsonl");
    REQUIRE(saved.size() == 2);
    CHECK(saved[0].status == TerminalStatus::AgentError);
}

TEST_CASE("cli run is reproducible byte for byte") {
    TempDir tmp("cli_repro");
    REQUIRE(run_cli("train --dialogues " + (data_dir() / "dialogues.jsonl").string() +
                    " --diagram " + (data_dir() / "cir6_diagram.txt").string() + " --out " +
                    (tmp.path / "models").string()) == 0);

    std::string stub_json = R"({
      "policy": "FLAKY",
      "p": 0.8,
      "seed": 7,
      "recommendation_pool": ["m21", "m22"],
      "data": {
        "compatibility": ")" + (data_dir() / "compatibility.txt").string() + R"(",
        "user_templates": ")" + (data_dir() / "user_templates.tsv").string() + R"(",
        "agent_templates": ")" + (data_dir() / "agent_templates.tsv").string() + R"(",
        "catalog": ")" + (data_dir() / "catalog.csv").string() + R"("
      }
    })";
    write_file(tmp.path / "stub.json", stub_json);
    std::string experiment = R"({
      "data": {
        "compatibility": ")" + (data_dir() / "compatibility.txt").string() + R"(",
        "cir6_diagram": ")" + (data_dir() / "cir6_diagram.txt").string() + R"(",
        "user_templates": ")" + (data_dir() / "user_templates.tsv").string() + R"(",
        "agent_index": ")" + (data_dir() / "agent_nlu_index.tsv").string() + R"(",
        "catalog": ")" + (data_dir() / "catalog.csv").string() + R"(",
        "ratings": ")" + (data_dir() / "ratings.csv").string() + R"(",
        "reference_dialogues": ")" + (data_dir() / "dialogues.jsonl").string() + R"("
      },
      "models": {"cir6": "models/cir6.json", "qrfa": "models/qrfa.json"},
      "simulators": ["CIR6-PKG"],
      "agents": [{
        "name": "B",
        "transport": "stdio",
        "command": [")" + cli_path() + R"(", "stub", "--config", "stub.json"],
        "capabilities": ["Disclose", "Refine", "Inquire", "Navigate", "MixedInitiative"]
      }],
      "n_dialogues": 5,
      "base_seed": 99,
      "out": "OUTDIR"
    })";
    // The stub config path is resolved from the CLI's working directory;
    // run from the temp dir so "stub.json" resolves.
    auto config_with_out = [&](const std::string& out) {
        std::string text = experiment;
        auto pos = text.find("OUTDIR");
        text.replace(pos, 6, out);
        return text;
    };
    write_file(tmp.path / "exp1.json", config_with_out("out1"));
    write_file(tmp.path / "exp2.json", config_with_out("out2"));

    auto run_in_tmp = [&](const std::string& config) {
        std::string command = "cd " + tmp.path.string() + " && " + cli_path() +
                              " run --config " + config + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(command.c_str()));
    };
    REQUIRE(run_in_tmp("exp1.json") == 0);
    REQUIRE(run_in_tmp("exp2.json") == 0);

    CHECK(read_file(tmp.path / "out1" / "B-CIR6-PKG.transcripts.jsonl") ==
          read_file(tmp.path / "out2" / "B-CIR6-PKG.transcripts.jsonl"));
    CHECK(read_file(tmp.path / "out1" / "report.json") ==
          read_file(tmp.path / "out2" / "report.json"));

    // The metrics verb reproduces the same report from saved transcripts.
    std::string metrics_command =
        "cd " + tmp.path.string() + " && " + cli_path() + " metrics --transcripts " +
        "out1/B-CIR6-PKG.transcripts.jsonl --reference " +
        (data_dir() / "dialogues.jsonl").string() + " --config exp1.json --out remetrics.json" +
        " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(metrics_command.c_str())) == 0);
    CHECK(read_file(tmp.path / "remetrics.json") == read_file(tmp.path / "out1" / "report.json"));
}
