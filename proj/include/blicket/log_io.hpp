#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blicket/log.hpp"

namespace blicket {

// One line of a JSONL intervention log.
struct LogRecord {
    std::string participant_id;
    std::string condition_id;
    std::string task_role;
    int trial = 0;
    std::vector<int> intervention;
    int outcome = 0;
    std::optional<std::string> timestamp;
};

// Fixed key order: participant_id, condition_id, task_role, trial,
// intervention, outcome[, timestamp].
std::string to_jsonl_line(const LogRecord &record);
LogRecord record_from_json(const nlohmann::json &j);

struct IngestDiagnostic {
    std::size_t line = 0;
    std::string message;
};

struct IngestResult {
    std::vector<ParticipantLog> logs;
    std::vector<IngestDiagnostic> rejects;
};

class IngestError : public std::runtime_error {
   public:
    explicit IngestError(std::vector<IngestDiagnostic> rejects);
    const std::vector<IngestDiagnostic> &rejects() const { return rejects_; }

   private:
    std::vector<IngestDiagnostic> rejects_;
};

// Parses, validates against the named condition, and groups records by
// participant (first-appearance order) and task (condition order). Any
// rejected line raises IngestError listing every reject, unless `lenient`,
// in which case valid records are kept and rejects are reported.
IngestResult ingest(std::istream &in, bool lenient = false);
IngestResult ingest(const std::filesystem::path &path, bool lenient = false);

std::vector<LogRecord> to_records(const ParticipantLog &log);
std::string export_jsonl(std::span<const ParticipantLog> logs);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path &path, const std::string &contents);

// Everything needed to reproduce an output file.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json config;
    nlohmann::json grids;
    nlohmann::json fold_plan;
    std::string version;

    // SHA-256 of the canonical JSON of `command` and `config`.
    std::string config_hash() const;
    nlohmann::json to_json() const;
};

RunManifest make_manifest(std::string command, std::uint64_t seed, nlohmann::json config);

// Path of the manifest sidecar written next to a non-JSON output.
std::filesystem::path manifest_path(const std::filesystem::path &output);

inline constexpr const char *kVersion = "0.1.0";

}  // namespace blicket
