#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "crsim/corpus.hpp"
#include "crsim/rng.hpp"

namespace crsim::testing {

inline std::filesystem::path data_dir() { return CRSIM_DATA_DIR; }
inline std::string cli_path() { return CRSIM_CLI_PATH; }

// Scratch directory, wiped on construction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / ("crsim_" + name)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Compact dialogue builder: turns alternate as given; 'U'/'A' selects the
// speaker, labels are taxonomy labels.
using TurnSpec = std::pair<char, std::vector<std::string>>;

inline CorpusDialogue make_dialogue(const std::string& id, const std::vector<TurnSpec>& turns) {
    CorpusDialogue dialogue;
    dialogue.id = id;
    for (const auto& [who, labels] : turns) {
        CorpusTurn turn;
        turn.speaker = who == 'U' ? Speaker::User : Speaker::Agent;
        turn.utterance = "(" + std::string(1, who) + ")";
        turn.actions = labels;
        dialogue.turns.push_back(std::move(turn));
    }
    return dialogue;
}

inline AnnotatedDialogueCorpus make_corpus(
    const std::vector<std::vector<TurnSpec>>& dialogues) {
    AnnotatedDialogueCorpus corpus;
    int i = 0;
    for (const auto& turns : dialogues) {
        corpus.dialogues.push_back(make_dialogue("d" + std::to_string(++i), turns));
    }
    return corpus;
}

// Synthetic ratings corpus: n_users users, each rating `per_user` items from
// a small generated catalog, at least one liked item each.
inline RatingsCorpus make_ratings(std::size_t n_users, std::size_t per_user,
                                  std::uint64_t seed) {
    static const std::vector<std::string> genres = {"comedy", "action",  "drama",
                                                    "scifi",  "romance", "thriller"};
    RatingsCorpus corpus;
    std::size_t n_items = std::max<std::size_t>(per_user * 3, 24);
    for (std::size_t i = 0; i < n_items; ++i) {
        CatalogItem item;
        item.id = "i" + std::to_string(i);
        item.title = "Film Number " + std::to_string(i);
        item.attributes = {genres[i % genres.size()], genres[(i / 2) % genres.size()]};
        corpus.catalog.add(std::move(item));
    }
    Rng rng(seed);
    static const std::vector<double> values = {0.5, 1.0, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
    for (std::size_t u = 0; u < n_users; ++u) {
        std::vector<std::size_t> items(n_items);
        for (std::size_t i = 0; i < n_items; ++i) items[i] = i;
        rng.shuffle(items);
        for (std::size_t k = 0; k < per_user; ++k) {
            Rating r;
            r.user_id = "u" + std::to_string(u);
            r.item_id = "i" + std::to_string(items[k]);
            r.value = k == 0 ? 4.5 : values[rng.next_below(values.size())];
            corpus.ratings.push_back(std::move(r));
        }
    }
    return corpus;
}

}  // namespace crsim::testing
