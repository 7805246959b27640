#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blicket/inference.hpp"
#include "blicket/tasks.hpp"

namespace blicket {

struct LoggedEvent {
    int trial = 0;
    Event event;
    std::optional<std::string> timestamp;

    friend bool operator==(const LoggedEvent &, const LoggedEvent &) = default;
};

struct TaskLog {
    TaskRole role = TaskRole::Transfer;
    std::vector<LoggedEvent> events;

    std::vector<Event> plain_events() const;
    friend bool operator==(const TaskLog &, const TaskLog &) = default;
};

// One participant's (or synthetic agent's) interventions, task by task in
// condition order.
struct ParticipantLog {
    std::string participant_id;
    std::string condition_id;
    std::vector<TaskLog> tasks;

    const TaskLog *task(TaskRole role) const;
    friend bool operator==(const ParticipantLog &, const ParticipantLog &) = default;
};

}  // namespace blicket
