#include "blicket/session.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <numeric>

#include "blicket/log_io.hpp"
#include "blicket/policy.hpp"

namespace blicket {

struct SessionManager::Session {
    std::mutex mutex;
    std::string id;
    SessionOptions options;
    Condition condition;
    std::size_t task_index = 0;
    std::vector<TaskLog> tasks;
    std::vector<Presentation> presentations;
    Rng machine;
    std::optional<AgentState> lens;
    bool complete = false;

    explicit Session(std::uint64_t seed) : machine(seed) {}

    const TaskConfig &task() const { return condition.tasks[task_index]; }
    int used() const { return static_cast<int>(tasks[task_index].events.size()); }

    void advance() {
        ++task_index;
        tasks.push_back(TaskLog{task().role, {}});
        if (lens) {
            lens = begin_task(*lens, task().n_blocks);
        }
    }

    ParticipantLog log() const {
        ParticipantLog out;
        out.participant_id = options.participant_id;
        out.condition_id = condition.id;
        out.tasks = tasks;
        return out;
    }
};

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms));
    return buf;
}

}  // namespace

SessionManager::SessionManager(std::optional<std::filesystem::path> checkpoint_dir)
    : checkpoint_dir_(std::move(checkpoint_dir)) {
    if (checkpoint_dir_) {
        std::filesystem::create_directories(*checkpoint_dir_);
    }
}

SessionManager::~SessionManager() = default;

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string &id) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw SessionError(404, "unknown session " + id);
    }
    return it->second;
}

std::string SessionManager::create(const SessionOptions &options) {
    auto condition = find_condition(options.condition_id);
    if (!condition) {
        throw SessionError(400, "unknown condition_id " + options.condition_id);
    }
    auto session = std::make_shared<Session>(options.seed);
    session->options = options;
    session->condition = std::move(*condition);
    for (std::size_t t = 0; t < session->condition.tasks.size(); ++t) {
        Rng cosmetic = Rng(options.seed).fork(t + 1);
        session->presentations.push_back(counterbalance(session->condition.tasks[t], cosmetic));
    }
    session->tasks.push_back(TaskLog{session->task().role, {}});
    if (options.lens) {
        try {
            session->lens = init_agent(*options.lens, session->task().n_blocks);
        } catch (const std::exception &e) {
            throw SessionError(400, std::string("invalid lens: ") + e.what());
        }
    }
    std::lock_guard lock(mutex_);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "s%06llu", static_cast<unsigned long long>(next_id_++));
    session->id = buf;
    if (session->options.participant_id.empty()) {
        session->options.participant_id = session->id;
    }
    sessions_.emplace(session->id, session);
    return session->id;
}

InterventionResult SessionManager::intervene(const std::string &id, const std::vector<int> &blocks) {
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    if (session->complete) {
        throw SessionError(409, "all tasks in this session are complete");
    }
    const TaskConfig &task = session->task();
    std::vector<int> sorted = blocks;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw SessionError(400, "intervention lists a block twice");
    }
    for (int b : sorted) {
        if (b < 0 || b >= task.n_blocks) {
            throw SessionError(400, "block index " + std::to_string(b) + " outside the task");
        }
    }
    if (session->used() >= task.intervention_limit) {
        throw SessionError(409, "intervention limit reached");
    }
    const Intervention q = BlockSet::from_indices(sorted);
    const Event event{q, machine_response(task, q, session->machine)};
    InterventionResult r;
    r.activated = event.activated;
    r.trial = session->used() + 1;
    r.task_index = session->task_index;
    r.role = task.role;
    r.remaining = task.intervention_limit - r.trial;

    session->tasks.back().events.push_back(
        {r.trial, event,
         session->options.record_timestamps ? std::optional<std::string>(utc_now()) : std::nullopt});
    if (session->lens) {
        session->lens = observe(*session->lens, event);
    }
    if (r.remaining == 0) {
        r.task_complete = true;
        if (session->task_index + 1 < session->condition.tasks.size()) {
            session->advance();
        } else {
            session->complete = true;
        }
    }
    r.session_complete = session->complete;
    if (checkpoint_dir_) {
        const ParticipantLog log = session->log();
        write_atomic(*checkpoint_dir_ / (session->id + ".jsonl"),
                     export_jsonl(std::span<const ParticipantLog>(&log, 1)));
    }
    return r;
}

void SessionManager::next_task(const std::string &id) {
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    if (session->complete || session->task_index + 1 >= session->condition.tasks.size()) {
        throw SessionError(409, "no further task in this session");
    }
    session->advance();
}

BeliefsView SessionManager::beliefs(const std::string &id, std::size_t top_k) {
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    if (!session->lens || !session->lens->belief) {
        throw SessionError(400, "this session has no model lens");
    }
    const JointBelief &belief = *session->lens->belief;
    BeliefsView view;
    view.task_index = session->task_index;
    for (int b = 0; b < belief.n_blocks(); ++b) {
        view.blicket_probability.push_back(blicket_probability(belief, b));
    }
    view.form_marginal = form_marginal(belief);
    const EigTable table = eig_table(belief);
    const auto combined = table.combined(session->lens->spec.params.w);
    std::vector<std::size_t> order(combined.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return combined[a] > combined[b]; });
    for (std::size_t i = 0; i < std::min(top_k, order.size()); ++i) {
        const std::size_t c = order[i];
        view.suggestions.push_back({Intervention{static_cast<std::uint32_t>(c)}, combined[c],
                                    table.structures[c], table.forms[c]});
    }
    return view;
}

nlohmann::json SessionManager::describe(const std::string &id) {
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    nlohmann::json tasks = nlohmann::json::array();
    for (std::size_t t = 0; t < session->condition.tasks.size(); ++t) {
        const TaskConfig &cfg = session->condition.tasks[t];
        const Presentation &p = session->presentations[t];
        nlohmann::json history = nlohmann::json::array();
        if (t < session->tasks.size()) {
            for (const auto &e : session->tasks[t].events) {
                history.push_back({{"trial", e.trial},
                                   {"intervention", e.event.intervention.indices()},
                                   {"outcome", e.event.activated ? 1 : 0}});
            }
        }
        tasks.push_back({{"task_role", to_string(cfg.role)},
                         {"n_blocks", cfg.n_blocks},
                         {"limit", cfg.intervention_limit},
                         {"presentation",
                          {{"block_at_slot", p.block_at_slot},
                           {"letters", p.letters},
                           {"colors", p.colors}}},
                         {"history", std::move(history)}});
    }
    return {
        {"session_id", session->id},
        {"participant_id", session->options.participant_id},
        {"condition_id", session->condition.id},
        {"task_index", session->task_index},
        {"complete", session->complete},
        {"lens", session->lens.has_value()},
        {"tasks", std::move(tasks)},
    };
}

FinishResult SessionManager::finish(const std::string &id) {
    std::shared_ptr<Session> session;
    {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) {
            throw SessionError(404, "unknown session " + id);
        }
        session = it->second;
        sessions_.erase(it);
    }
    std::lock_guard lock(session->mutex);
    FinishResult out;
    out.log = session->log();
    // Drop trailing empty tasks so the export matches what was played.
    while (!out.log.tasks.empty() && out.log.tasks.back().events.empty()) {
        out.log.tasks.pop_back();
    }
    out.jsonl = export_jsonl(std::span<const ParticipantLog>(&out.log, 1));
    if (session->options.reveal) {
        nlohmann::json truth = nlohmann::json::array();
        for (const auto &t : session->condition.tasks) {
            truth.push_back(to_json(t));
        }
        out.ground_truth = std::move(truth);
    }
    return out;
}

nlohmann::json to_json(const InterventionResult &r) {
    return {
        {"outcome", r.activated ? 1 : 0},
        {"trial", r.trial},
        {"remaining", r.remaining},
        {"task_index", r.task_index},
        {"task_role", to_string(r.role)},
        {"task_complete", r.task_complete},
        {"session_complete", r.session_complete},
    };
}

nlohmann::json to_json(const BeliefsView &view) {
    nlohmann::json forms = nlohmann::json::array();
    for (const auto &f : view.form_marginal.forms) {
        forms.push_back({f.bias, f.gain});
    }
    nlohmann::json suggestions = nlohmann::json::array();
    for (const auto &s : view.suggestions) {
        suggestions.push_back({{"intervention", s.intervention.indices()},
                               {"combined_eig", s.combined_eig},
                               {"eig_structures", s.eig_structures},
                               {"eig_forms", s.eig_forms}});
    }
    return {
        {"task_index", view.task_index},
        {"blicket_probability", view.blicket_probability},
        {"form_marginal", {{"forms", std::move(forms)}, {"probs", view.form_marginal.weights}}},
        {"suggestions", std::move(suggestions)},
    };
}

AgentSpec lens_from_json(const nlohmann::json &j) {
    const AgentKind kind = parse_agent_kind(j.value("model", std::string("hbm")));
    PolicyParams params{j.value("w", 0.5), j.value("t", 1.0)};
    AgentSpec spec = make_spec(kind, j.value("prior", 1), params);
    spec.track_belief = kind == AgentKind::Random;
    validate(spec);
    return spec;
}

namespace {

void send_json(httplib::Response &res, int status, const nlohmann::json &body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request &req, httplib::Response &res) {
        try {
            handler(req, res);
        } catch (const SessionError &e) {
            send_json(res, e.status(), {{"error", e.what()}});
        } catch (const nlohmann::json::exception &e) {
            send_json(res, 400, {{"error", std::string("bad request body: ") + e.what()}});
        } catch (const std::invalid_argument &e) {
            send_json(res, 400, {{"error", e.what()}});
        } catch (const std::exception &e) {
            send_json(res, 500, {{"error", e.what()}});
        }
    };
}

nlohmann::json body_of(const httplib::Request &req) {
    if (req.body.empty()) {
        return nlohmann::json::object();
    }
    return nlohmann::json::parse(req.body);
}

}  // namespace

void register_routes(httplib::Server &server, SessionManager &manager) {
    server.Post("/sessions", guarded([&](const httplib::Request &req, httplib::Response &res) {
                    const auto body = body_of(req);
                    SessionOptions options;
                    options.condition_id = body.at("condition_id").get<std::string>();
                    options.seed = body.value("seed", std::uint64_t{0});
                    options.participant_id = body.value("participant_id", std::string());
                    options.reveal = body.value("reveal", false);
                    if (body.contains("lens") && !body.at("lens").is_null()) {
                        options.lens = lens_from_json(body.at("lens"));
                    }
                    const std::string id = manager.create(options);
                    send_json(res, 201, manager.describe(id));
                }));
    server.Get(R"(/sessions/([^/]+))",
               guarded([&](const httplib::Request &req, httplib::Response &res) {
                   send_json(res, 200, manager.describe(req.matches[1]));
               }));
    server.Post(R"(/sessions/([^/]+)/interventions)",
                guarded([&](const httplib::Request &req, httplib::Response &res) {
                    const auto body = body_of(req);
                    const auto blocks = body.at("intervention").get<std::vector<int>>();
                    send_json(res, 200, to_json(manager.intervene(req.matches[1], blocks)));
                }));
    server.Post(R"(/sessions/([^/]+)/next-task)",
                guarded([&](const httplib::Request &req, httplib::Response &res) {
                    manager.next_task(req.matches[1]);
                    send_json(res, 200, manager.describe(req.matches[1]));
                }));
    server.Get(R"(/sessions/([^/]+)/beliefs)",
               guarded([&](const httplib::Request &req, httplib::Response &res) {
                   std::size_t k = 5;
                   if (req.has_param("k")) {
                       k = static_cast<std::size_t>(std::stoul(req.get_param_value("k")));
                   }
                   send_json(res, 200, to_json(manager.beliefs(req.matches[1], k)));
               }));
    server.Post(R"(/sessions/([^/]+)/finish)",
                guarded([&](const httplib::Request &req, httplib::Response &res) {
                    const FinishResult r = manager.finish(req.matches[1]);
                    nlohmann::json body = {{"log", r.jsonl}};
                    if (r.ground_truth) {
                        body["ground_truth"] = *r.ground_truth;
                    }
                    send_json(res, 200, body);
                }));
}

}  // namespace blicket
