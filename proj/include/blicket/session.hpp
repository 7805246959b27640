#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blicket/agents.hpp"
#include "blicket/log.hpp"
#include "blicket/tasks.hpp"

namespace httplib {
class Server;
}

namespace blicket {

// Errors carry the HTTP status they map to.
class SessionError : public std::runtime_error {
   public:
    SessionError(int status, const std::string &what) : std::runtime_error(what), status_(status) {}
    int status() const { return status_; }

   private:
    int status_;
};

struct SessionOptions {
    std::string condition_id;
    std::uint64_t seed = 0;
    std::string participant_id;
    // Model whose belief shadows the player's history.
    std::optional<AgentSpec> lens;
    // Include ground truth in the finish payload.
    bool reveal = false;
    bool record_timestamps = true;
};

struct InterventionResult {
    bool activated = false;
    int trial = 0;
    int remaining = 0;
    std::size_t task_index = 0;
    TaskRole role = TaskRole::Transfer;
    bool task_complete = false;
    bool session_complete = false;
};

struct Suggestion {
    Intervention intervention;
    double combined_eig = 0.0;
    double eig_structures = 0.0;
    double eig_forms = 0.0;
};

struct BeliefsView {
    std::size_t task_index = 0;
    std::vector<double> blicket_probability;
    FormPrior form_marginal;
    std::vector<Suggestion> suggestions;
};

struct FinishResult {
    std::string jsonl;
    ParticipantLog log;
    std::optional<nlohmann::json> ground_truth;
};

// In-memory store of live sessions. Calls on one session are serialized;
// distinct sessions proceed independently.
class SessionManager {
   public:
    explicit SessionManager(std::optional<std::filesystem::path> checkpoint_dir = std::nullopt);
    ~SessionManager();

    std::string create(const SessionOptions &options);
    InterventionResult intervene(const std::string &id, const std::vector<int> &blocks);
    // Moves on to the next task before its limit (Experiment 1 style).
    void next_task(const std::string &id);
    BeliefsView beliefs(const std::string &id, std::size_t top_k = 5);
    nlohmann::json describe(const std::string &id);
    FinishResult finish(const std::string &id);

   private:
    struct Session;
    std::shared_ptr<Session> find(const std::string &id);

    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
    std::optional<std::filesystem::path> checkpoint_dir_;
};

nlohmann::json to_json(const InterventionResult &r);
nlohmann::json to_json(const BeliefsView &view);

// POST /sessions, GET /sessions/{id}, POST /sessions/{id}/interventions,
// POST /sessions/{id}/next-task, GET /sessions/{id}/beliefs?k=N,
// POST /sessions/{id}/finish.
void register_routes(httplib::Server &server, SessionManager &manager);

// Parses a lens object: {"model": "hbm", "prior": 1, "w": 0.5, "t": 1.0}.
AgentSpec lens_from_json(const nlohmann::json &j);

}  // namespace blicket
