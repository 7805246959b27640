#include "blicket/log.hpp"

namespace blicket {

std::vector<Event> TaskLog::plain_events() const {
    std::vector<Event> out;
    out.reserve(events.size());
    for (const auto &e : events) {
        out.push_back(e.event);
    }
    return out;
}

const TaskLog *ParticipantLog::task(TaskRole role) const {
    for (const auto &t : tasks) {
        if (t.role == role) {
            return &t;
        }
    }
    return nullptr;
}

}  // namespace blicket
