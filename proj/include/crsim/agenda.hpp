#pragma once

#include <vector>

#include "crsim/actions.hpp"
#include "crsim/errors.hpp"

namespace crsim {

// Stack of pending user actions. Index 0 is the bottom; the last element
// is the top, which drives the next user turn. An empty agenda signals
// dialogue termination.
class Agenda {
public:
    Agenda() = default;
    explicit Agenda(std::vector<UserAction> bottom_to_top)
        : items_(std::move(bottom_to_top)) {}

    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }

    const UserAction& top() const {
        require_non_empty();
        return items_.back();
    }

    void push(UserAction action) { items_.push_back(std::move(action)); }

    UserAction pull() {
        require_non_empty();
        UserAction action = std::move(items_.back());
        items_.pop_back();
        return action;
    }

    void replace_top(UserAction action) {
        require_non_empty();
        items_.back() = std::move(action);
    }

    void clear() { items_.clear(); }

    // Early-stop form: drop everything and leave a single Complete action.
    void clear_to_complete() {
        items_.clear();
        items_.push_back(UserAction{UserActionKind::NavigateComplete, {}});
    }

    // Bottom-to-top view, for inspection and tests.
    const std::vector<UserAction>& items() const { return items_; }

    bool operator==(const Agenda&) const = default;

private:
    void require_non_empty() const {
        if (items_.empty()) throw ArgumentError("agenda is empty");
    }

    std::vector<UserAction> items_;
};

}  // namespace crsim
