#include "blicket/log_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <regex>
#include <sstream>

#include "blicket/evaluation.hpp"
#include "blicket/forms.hpp"

namespace blicket {

std::string to_jsonl_line(const LogRecord &record) {
    nlohmann::ordered_json j;
    j["participant_id"] = record.participant_id;
    j["condition_id"] = record.condition_id;
    j["task_role"] = record.task_role;
    j["trial"] = record.trial;
    j["intervention"] = record.intervention;
    j["outcome"] = record.outcome;
    if (record.timestamp) {
        j["timestamp"] = *record.timestamp;
    }
    return j.dump();
}

namespace {

template <typename T>
T required(const nlohmann::json &j, const char *key) {
    if (!j.contains(key)) {
        throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw std::invalid_argument(std::string("field \"") + key + "\" has the wrong type");
    }
}

const std::regex &iso8601() {
    static const std::regex re(
        R"(^\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
    return re;
}

}  // namespace

LogRecord record_from_json(const nlohmann::json &j) {
    if (!j.is_object()) {
        throw std::invalid_argument("record must be a JSON object");
    }
    LogRecord r;
    r.participant_id = required<std::string>(j, "participant_id");
    r.condition_id = required<std::string>(j, "condition_id");
    r.task_role = required<std::string>(j, "task_role");
    if (!j.contains("trial") || !j.at("trial").is_number_integer()) {
        throw std::invalid_argument("field \"trial\" must be an integer");
    }
    r.trial = j.at("trial").get<int>();
    if (r.trial < 1) {
        throw std::invalid_argument("trial must be >= 1");
    }
    if (!j.contains("intervention") || !j.at("intervention").is_array()) {
        throw std::invalid_argument("field \"intervention\" must be an array of block indices");
    }
    for (const auto &v : j.at("intervention")) {
        if (!v.is_number_integer()) {
            throw std::invalid_argument("intervention entries must be integers");
        }
        r.intervention.push_back(v.get<int>());
    }
    if (!j.contains("outcome") || !j.at("outcome").is_number_integer()) {
        throw std::invalid_argument("field \"outcome\" must be 0 or 1");
    }
    r.outcome = j.at("outcome").get<int>();
    if (r.outcome != 0 && r.outcome != 1) {
        throw std::invalid_argument("field \"outcome\" must be 0 or 1");
    }
    if (j.contains("timestamp") && !j.at("timestamp").is_null()) {
        if (!j.at("timestamp").is_string()) {
            throw std::invalid_argument("field \"timestamp\" must be an ISO-8601 string");
        }
        r.timestamp = j.at("timestamp").get<std::string>();
        if (!std::regex_match(*r.timestamp, iso8601())) {
            throw std::invalid_argument("timestamp is not ISO-8601: " + *r.timestamp);
        }
    }
    return r;
}

IngestError::IngestError(std::vector<IngestDiagnostic> rejects)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << rejects.size() << " invalid record(s)";
          for (const auto &d : rejects) {
              os << "\n  line " << d.line << ": " << d.message;
          }
          return os.str();
      }()),
      rejects_(std::move(rejects)) {}

IngestResult ingest(std::istream &in, bool lenient) {
    struct Pending {
        ParticipantLog log;
        Condition condition;
        std::map<std::size_t, TaskLog> tasks;
    };
    std::vector<Pending> pending;
    std::map<std::string, std::size_t> index_of;
    std::map<std::string, Condition> condition_cache;
    IngestResult result;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
            continue;
        }
        try {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error &e) {
                throw std::invalid_argument(std::string("not valid JSON: ") + e.what());
            }
            const LogRecord r = record_from_json(j);

            auto cached = condition_cache.find(r.condition_id);
            if (cached == condition_cache.end()) {
                auto c = find_condition(r.condition_id);
                if (!c) {
                    throw std::invalid_argument("unknown condition_id \"" + r.condition_id + "\"");
                }
                cached = condition_cache.emplace(r.condition_id, std::move(*c)).first;
            }
            const Condition &condition = cached->second;

            const TaskRole role = parse_task_role(r.task_role);
            std::size_t task_index = condition.tasks.size();
            for (std::size_t t = 0; t < condition.tasks.size(); ++t) {
                if (condition.tasks[t].role == role) {
                    task_index = t;
                }
            }
            if (task_index == condition.tasks.size()) {
                throw std::invalid_argument("condition " + condition.id + " has no " +
                                            r.task_role + " task");
            }
            const TaskConfig &task = condition.tasks[task_index];
            std::vector<int> sorted = r.intervention;
            std::sort(sorted.begin(), sorted.end());
            for (int b : sorted) {
                if (b < 0 || b >= task.n_blocks) {
                    throw std::invalid_argument("block index " + std::to_string(b) +
                                                " outside a " + std::to_string(task.n_blocks) +
                                                "-block task");
                }
            }
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                throw std::invalid_argument("intervention lists a block twice");
            }

            auto it = index_of.find(r.participant_id);
            if (it == index_of.end()) {
                it = index_of.emplace(r.participant_id, pending.size()).first;
                Pending p;
                p.log.participant_id = r.participant_id;
                p.log.condition_id = r.condition_id;
                p.condition = condition;
                pending.push_back(std::move(p));
            }
            Pending &p = pending[it->second];
            if (p.log.condition_id != r.condition_id) {
                throw std::invalid_argument("participant " + r.participant_id +
                                            " appears under two conditions");
            }
            TaskLog &tl = p.tasks[task_index];
            tl.role = role;
            if (!tl.events.empty() && r.trial <= tl.events.back().trial) {
                throw std::invalid_argument("trial " + std::to_string(r.trial) +
                                            " does not increase for this participant and task");
            }
            if (static_cast<int>(tl.events.size()) >= task.intervention_limit) {
                throw std::invalid_argument("task limit of " +
                                            std::to_string(task.intervention_limit) +
                                            " interventions exceeded");
            }
            tl.events.push_back(
                {r.trial, Event{BlockSet::from_indices(sorted), r.outcome == 1}, r.timestamp});
        } catch (const std::exception &e) {
            result.rejects.push_back({line_no, e.what()});
        }
    }
    if (!result.rejects.empty() && !lenient) {
        throw IngestError(result.rejects);
    }
    for (auto &p : pending) {
        if (p.tasks.empty()) {
            continue;
        }
        const std::size_t last = p.tasks.rbegin()->first;
        for (std::size_t t = 0; t <= last; ++t) {
            auto found = p.tasks.find(t);
            if (found != p.tasks.end()) {
                p.log.tasks.push_back(std::move(found->second));
            } else {
                p.log.tasks.push_back(TaskLog{p.condition.tasks[t].role, {}});
            }
        }
        result.logs.push_back(std::move(p.log));
    }
    return result;
}

IngestResult ingest(const std::filesystem::path &path, bool lenient) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open log file " + path.string());
    }
    return ingest(in, lenient);
}

std::vector<LogRecord> to_records(const ParticipantLog &log) {
    std::vector<LogRecord> out;
    for (const auto &task : log.tasks) {
        for (const auto &e : task.events) {
            out.push_back({log.participant_id, log.condition_id, std::string(to_string(task.role)),
                           e.trial, e.event.intervention.indices(), e.event.activated ? 1 : 0,
                           e.timestamp});
        }
    }
    return out;
}

std::string export_jsonl(std::span<const ParticipantLog> logs) {
    std::string out;
    for (const auto &log : logs) {
        for (const auto &r : to_records(log)) {
            out += to_jsonl_line(r);
            out += '\n';
        }
    }
    return out;
}

void write_atomic(const std::filesystem::path &path, const std::string &contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string RunManifest::config_hash() const {
    const std::string canonical = nlohmann::json{{"command", command}, {"config", config}}.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

nlohmann::json RunManifest::to_json() const {
    return {
        {"command", command}, {"seed", seed},         {"config", config},
        {"grids", grids},     {"fold_plan", fold_plan}, {"version", version},
        {"config_hash", config_hash()},
    };
}

RunManifest make_manifest(std::string command, std::uint64_t seed, nlohmann::json config) {
    RunManifest m;
    m.command = std::move(command);
    m.seed = seed;
    m.config = std::move(config);
    m.version = kVersion;
    nlohmann::json priors = nlohmann::json::array();
    for (const auto &row : prior_grid()) {
        priors.push_back({{"bias", {row.bias.shape, row.bias.scale}},
                          {"gain", {row.gain.shape, row.gain.scale}}});
    }
    m.grids = {
        {"bias", form_grid().bias_values()},
        {"gain", form_grid().gain_values()},
        {"priors", std::move(priors)},
        {"t", kTemperatureGrid},
        {"w", kWeightGrid},
    };
    m.fold_plan = nullptr;
    return m;
}

std::filesystem::path manifest_path(const std::filesystem::path &output) {
    auto p = output;
    p += ".manifest.json";
    return p;
}

}  // namespace blicket
