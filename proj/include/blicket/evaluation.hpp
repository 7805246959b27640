#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blicket/agents.hpp"
#include "blicket/log.hpp"
#include "blicket/policy.hpp"
#include "blicket/tasks.hpp"

namespace blicket {

inline constexpr std::array<double, 6> kTemperatureGrid = {0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
inline constexpr std::array<double, 10> kWeightGrid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                                       0.6, 0.7, 0.8, 0.9, 1.0};
inline constexpr int kFoldCount = 4;

// Weight values a model is fitted over: {0} for StructureOnlyEIG, the
// 0.1..1.0 grid for the other belief-based models, empty for Random.
std::vector<double> weight_grid(AgentKind kind);

// All (t, w) combinations for a kind, t-major. Random gets one entry.
std::vector<PolicyParams> parameter_grid(AgentKind kind);

// Prior rows a kind is marginalized over: 1..24, or {1} for FixedForm/Random.
std::vector<int> prior_indices(AgentKind kind);

class MalformedLog : public std::invalid_argument {
   public:
    MalformedLog(const std::string &what, std::size_t task, std::size_t position)
        : std::invalid_argument(what), task_(task), position_(position) {}
    std::size_t task() const { return task_; }
    std::size_t position() const { return position_; }

   private:
    std::size_t task_;
    std::size_t position_;
};

// Throws MalformedLog naming the first invalid event.
void validate_log(const ParticipantLog &log, const Condition &condition);

struct EvaluationOptions {
    // Scoring tasks above this size must be requested explicitly.
    int max_scored_blocks = 6;
    bool allow_large_tasks = false;
};

// Per-position EIG tables for one model route on one scored task. Does not
// depend on (t, w), so one trace serves the whole parameter grid.
struct ScoringTrace {
    int n_blocks = 0;
    std::vector<std::uint32_t> chosen;
    std::vector<EigTable> tables;
};

// Conditions on every earlier task (with the kind's transfer rule) and on
// the full prefix of the scored task before each position.
ScoringTrace scoring_trace(const AgentSpec &spec, const ParticipantLog &log,
                           const Condition &condition, std::size_t task_index,
                           const EvaluationOptions &options = {});

std::vector<double> trace_likelihoods(const ScoringTrace &trace, const PolicyParams &params);

// Probability the model assigns to each logged intervention of the task.
std::vector<double> predictive_likelihood(const AgentSpec &spec, const ParticipantLog &log,
                                          const Condition &condition, std::size_t task_index,
                                          const EvaluationOptions &options = {});

double marginalize_priors(std::span<const double> per_prior_scores);

enum class FoldUnit { Participants, Interventions };

struct FoldPlan {
    FoldUnit unit = FoldUnit::Interventions;
    std::vector<int> fold_of_unit;
    std::uint64_t seed = 0;
    bool stratified = false;

    std::vector<std::size_t> members(int fold) const;
    nlohmann::json to_json() const;
};

// Positions shuffled then cut into kFoldCount contiguous, balanced chunks.
FoldPlan intervention_folds(std::size_t n_positions, std::uint64_t seed);

// Participants shuffled within each stratum (condition id) and dealt
// round-robin; without stratification, shuffled and chunked.
FoldPlan participant_folds(std::span<const std::string> strata, std::uint64_t seed,
                           bool stratified);

// Predictive likelihoods of one participant under one model over its whole
// fitting grid: value(prior, combo, position).
struct LikelihoodCube {
    AgentKind kind = AgentKind::HBM;
    std::vector<int> priors;
    std::vector<PolicyParams> params;
    std::size_t n_positions = 0;
    std::vector<double> values;

    double operator()(std::size_t prior, std::size_t combo, std::size_t position) const {
        return values[(prior * params.size() + combo) * n_positions + position];
    }
};

// Cubes for every kind in `kinds`, for the scored (transfer) task.
std::vector<LikelihoodCube> likelihood_cubes(const ParticipantLog &log, const Condition &condition,
                                             std::span<const AgentKind> kinds,
                                             const EvaluationOptions &options = {});

struct FoldFit {
    PolicyParams params;
    double train_score = 0.0;
    double holdout_score = 0.0;
    // Holdout score at the worst grid combination, for sanity reporting.
    double holdout_worst = 0.0;
};

struct ModelScore {
    AgentKind kind = AgentKind::HBM;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::vector<FoldFit> folds;
};

struct IndividualResult {
    std::string participant_id;
    std::string condition_id;
    std::vector<ModelScore> models;
    AgentKind winner = AgentKind::Random;
    FoldPlan plan;
};

IndividualResult crossval_individual(const ParticipantLog &log, const Condition &condition,
                                     std::uint64_t seed,
                                     std::span<const AgentKind> kinds = kAgentKinds,
                                     const EvaluationOptions &options = {});

// Same, from precomputed cubes (one per kind).
IndividualResult crossval_individual(const std::string &participant_id,
                                     const std::string &condition_id,
                                     std::span<const LikelihoodCube> cubes, std::uint64_t seed);

struct AveragedResult {
    std::vector<ModelScore> models;
    // Model kinds ordered by mean, best first.
    std::vector<AgentKind> ranking;
    FoldPlan plan;
};

AveragedResult crossval_averaged(std::span<const std::vector<LikelihoodCube>> cubes,
                                 std::span<const std::string> strata, std::uint64_t seed,
                                 bool stratified = true);

// Resolves each log's condition and builds its cubes in parallel.
std::vector<std::vector<LikelihoodCube>> build_cubes(std::span<const ParticipantLog> logs,
                                                     std::span<const AgentKind> kinds,
                                                     const EvaluationOptions &options = {});

struct Comparison {
    AveragedResult averaged;
    std::vector<IndividualResult> individual;
    std::map<AgentKind, int> best_model_counts;
};

Comparison compare_models(std::span<const ParticipantLog> logs, std::uint64_t seed,
                          bool stratified = true, const EvaluationOptions &options = {});

nlohmann::json to_json(const Comparison &comparison);

struct RecoveryOptions {
    PolicyParams agent_params{0.5, 0.01};
    std::uint64_t seed = 0;
};

struct ConfusionMatrix {
    std::vector<AgentKind> kinds;
    // counts[generating][recovered], indexed like `kinds`.
    std::vector<std::vector<int>> counts;

    int count(AgentKind generating, AgentKind recovered) const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

// Simulates n agents per kind spread over the given conditions (prior rows
// drawn uniformly), runs crossval_individual on each, and tabulates
// generating kind against winning kind.
ConfusionMatrix model_recovery(int n_agents_per_model, std::span<const Condition> conditions,
                               const RecoveryOptions &options = {},
                               const EvaluationOptions &eval = {});

struct ScoreRow {
    AgentKind kind;
    int prior_index;
    PolicyParams params;
    std::string fold;
    std::string unit;
    double mean_likelihood;
    double mean_log_likelihood;
    std::size_t n;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;
    std::string to_csv() const;
};

// Mean predictive likelihood of each participant's transfer interventions
// for every (prior, t, w) requested.
ScoreTable score_logs(std::span<const ParticipantLog> logs, AgentKind kind,
                      std::span<const int> priors, std::span<const PolicyParams> params,
                      const EvaluationOptions &options = {});

}  // namespace blicket
