#include "blicket/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "blicket/parallel.hpp"

namespace blicket {

std::vector<double> weight_grid(AgentKind kind) {
    switch (kind) {
        case AgentKind::StructureOnlyEIG:
            return {0.0};
        case AgentKind::Random:
            return {};
        default:
            return {kWeightGrid.begin(), kWeightGrid.end()};
    }
}

std::vector<PolicyParams> parameter_grid(AgentKind kind) {
    if (kind == AgentKind::Random) {
        return {PolicyParams{0.0, 1.0}};
    }
    std::vector<PolicyParams> out;
    for (double t : kTemperatureGrid) {
        for (double w : weight_grid(kind)) {
            out.push_back({w, t});
        }
    }
    return out;
}

std::vector<int> prior_indices(AgentKind kind) {
    if (!uses_prior_grid(kind)) {
        return {1};
    }
    std::vector<int> out(kPriorCount);
    std::iota(out.begin(), out.end(), 1);
    return out;
}

void validate_log(const ParticipantLog &log, const Condition &condition) {
    if (log.tasks.size() > condition.tasks.size()) {
        throw MalformedLog("log has more tasks than condition " + condition.id,
                           condition.tasks.size(), 0);
    }
    for (std::size_t t = 0; t < log.tasks.size(); ++t) {
        const TaskConfig &cfg = condition.tasks[t];
        const TaskLog &task = log.tasks[t];
        if (task.role != cfg.role) {
            throw MalformedLog("task " + std::to_string(t) + " should have role " +
                                   std::string(to_string(cfg.role)),
                               t, 0);
        }
        int last_trial = 0;
        for (std::size_t k = 0; k < task.events.size(); ++k) {
            const LoggedEvent &e = task.events[k];
            const std::string where =
                " (task " + std::to_string(t) + ", position " + std::to_string(k) + ")";
            if (static_cast<int>(k) >= cfg.intervention_limit) {
                throw MalformedLog("more interventions than the task limit" + where, t, k);
            }
            if ((e.event.intervention.bits >> cfg.n_blocks) != 0) {
                throw MalformedLog("intervention references a block outside the task" + where, t,
                                   k);
            }
            if (e.trial <= last_trial) {
                throw MalformedLog("trial numbers must increase" + where, t, k);
            }
            last_trial = e.trial;
        }
    }
}

ScoringTrace scoring_trace(const AgentSpec &spec, const ParticipantLog &log,
                           const Condition &condition, std::size_t task_index,
                           const EvaluationOptions &options) {
    validate_log(log, condition);
    if (task_index >= log.tasks.size()) {
        throw MalformedLog("log has no task " + std::to_string(task_index), task_index, 0);
    }
    const TaskConfig &scored = condition.tasks[task_index];
    if (scored.n_blocks > options.max_scored_blocks && !options.allow_large_tasks) {
        throw std::invalid_argument("scoring a " + std::to_string(scored.n_blocks) +
                                    "-block task is disabled; enable large tasks explicitly");
    }
    ScoringTrace trace;
    trace.n_blocks = scored.n_blocks;
    for (const auto &e : log.tasks[task_index].events) {
        trace.chosen.push_back(e.event.intervention.bits);
    }
    if (spec.kind == AgentKind::Random) {
        return trace;
    }

    AgentState state = init_agent(spec, condition.tasks[0].n_blocks);
    for (std::size_t t = 0; t < task_index; ++t) {
        state.belief = condition_on(*state.belief, log.tasks[t].plain_events());
        state = begin_task(state, condition.tasks[t + 1].n_blocks);
    }
    const auto &events = log.tasks[task_index].events;
    JointBelief belief = *state.belief;
    for (std::size_t k = 0; k < events.size(); ++k) {
        trace.tables.push_back(eig_table(belief));
        if (k + 1 < events.size()) {
            belief = update(belief, events[k].event);
        }
    }
    return trace;
}

std::vector<double> trace_likelihoods(const ScoringTrace &trace, const PolicyParams &params) {
    std::vector<double> out(trace.chosen.size());
    if (trace.tables.empty()) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(candidate_count(trace.n_blocks)));
        return out;
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto dist = softmax_policy(trace.tables[k].combined(params.w), params.t);
        out[k] = dist[trace.chosen[k]];
    }
    return out;
}

std::vector<double> predictive_likelihood(const AgentSpec &spec, const ParticipantLog &log,
                                          const Condition &condition, std::size_t task_index,
                                          const EvaluationOptions &options) {
    validate(spec);
    return trace_likelihoods(scoring_trace(spec, log, condition, task_index, options), spec.params);
}

double marginalize_priors(std::span<const double> per_prior_scores) {
    if (per_prior_scores.empty()) {
        throw std::invalid_argument("no per-prior scores to marginalize");
    }
    double total = 0.0;
    for (double s : per_prior_scores) {
        total += s;
    }
    return total / static_cast<double>(per_prior_scores.size());
}

std::vector<std::size_t> FoldPlan::members(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of_unit.size(); ++i) {
        if (fold_of_unit[i] == fold) {
            out.push_back(i);
        }
    }
    return out;
}

nlohmann::json FoldPlan::to_json() const {
    return {
        {"unit", unit == FoldUnit::Participants ? "participants" : "interventions"},
        {"seed", seed},
        {"stratified", stratified},
        {"folds", fold_of_unit},
    };
}

FoldPlan intervention_folds(std::size_t n_positions, std::uint64_t seed) {
    if (n_positions < static_cast<std::size_t>(kFoldCount)) {
        throw std::invalid_argument("need at least " + std::to_string(kFoldCount) +
                                    " scorable interventions, got " + std::to_string(n_positions));
    }
    std::vector<std::size_t> order(n_positions);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    FoldPlan plan;
    plan.unit = FoldUnit::Interventions;
    plan.seed = seed;
    plan.fold_of_unit.assign(n_positions, 0);
    std::size_t begin = 0;
    for (int f = 0; f < kFoldCount; ++f) {
        const std::size_t end = n_positions * static_cast<std::size_t>(f + 1) / kFoldCount;
        for (std::size_t i = begin; i < end; ++i) {
            plan.fold_of_unit[order[i]] = f;
        }
        begin = end;
    }
    return plan;
}

FoldPlan participant_folds(std::span<const std::string> strata, std::uint64_t seed,
                           bool stratified) {
    const std::size_t n = strata.size();
    if (n < static_cast<std::size_t>(kFoldCount)) {
        throw std::invalid_argument("need at least " + std::to_string(kFoldCount) +
                                    " participants, got " + std::to_string(n));
    }
    if (!stratified) {
        FoldPlan plan = intervention_folds(n, seed);
        plan.unit = FoldUnit::Participants;
        return plan;
    }
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        groups[strata[i]].push_back(i);
    }
    Rng rng(seed);
    FoldPlan plan;
    plan.unit = FoldUnit::Participants;
    plan.seed = seed;
    plan.stratified = true;
    plan.fold_of_unit.assign(n, 0);
    std::size_t dealt = 0;
    for (auto &[stratum, members] : groups) {
        rng.shuffle(members);
        for (std::size_t m : members) {
            plan.fold_of_unit[m] = static_cast<int>(dealt++ % kFoldCount);
        }
    }
    return plan;
}

namespace {

enum class Route { Transfer, NoTransfer, Fixed, Random };

Route route_of(AgentKind kind) {
    switch (kind) {
        case AgentKind::HBM:
        case AgentKind::StructureOnlyEIG:
            return Route::Transfer;
        case AgentKind::NoTransfer:
            return Route::NoTransfer;
        case AgentKind::FixedForm:
            return Route::Fixed;
        case AgentKind::Random:
            return Route::Random;
    }
    return Route::Random;
}

AgentKind representative(Route route) {
    switch (route) {
        case Route::Transfer:
            return AgentKind::HBM;
        case Route::NoTransfer:
            return AgentKind::NoTransfer;
        case Route::Fixed:
            return AgentKind::FixedForm;
        case Route::Random:
            return AgentKind::Random;
    }
    return AgentKind::Random;
}

// Mean over priors of the mean likelihood over the given (participant,
// position) units, for one parameter combination.
template <typename UnitVisitor>
double marginal_mean(std::size_t n_priors, UnitVisitor &&sum_for_prior) {
    std::vector<double> per_prior(n_priors);
    for (std::size_t r = 0; r < n_priors; ++r) {
        const auto [sum, count] = sum_for_prior(r);
        per_prior[r] = sum / static_cast<double>(count);
    }
    return marginalize_priors(per_prior);
}

double sample_stderr(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
           std::sqrt(static_cast<double>(xs.size()));
}

struct FitOutcome {
    std::size_t best = 0;
    double best_score = -1.0;
};

// Picks the first combination with the highest score.
template <typename Score>
FitOutcome fit(std::size_t n_combos, Score &&score) {
    FitOutcome out;
    for (std::size_t c = 0; c < n_combos; ++c) {
        const double s = score(c);
        if (s > out.best_score) {
            out.best_score = s;
            out.best = c;
        }
    }
    return out;
}

}  // namespace

std::vector<LikelihoodCube> likelihood_cubes(const ParticipantLog &log, const Condition &condition,
                                             std::span<const AgentKind> kinds,
                                             const EvaluationOptions &options) {
    validate_log(log, condition);
    const std::size_t scored = condition.transfer_index();
    if (scored >= log.tasks.size()) {
        throw MalformedLog("log has no transfer task", scored, 0);
    }
    // One trace per (route, prior), shared by kinds on the same route.
    std::map<Route, std::vector<ScoringTrace>> traces;
    for (AgentKind kind : kinds) {
        const Route route = route_of(kind);
        if (traces.contains(route)) {
            continue;
        }
        std::vector<ScoringTrace> &per_prior = traces[route];
        for (int prior : prior_indices(representative(route))) {
            per_prior.push_back(scoring_trace(make_spec(representative(route), prior), log,
                                              condition, scored, options));
        }
    }
    std::vector<LikelihoodCube> cubes;
    for (AgentKind kind : kinds) {
        const auto &per_prior = traces.at(route_of(kind));
        LikelihoodCube cube;
        cube.kind = kind;
        cube.priors = prior_indices(kind);
        cube.params = parameter_grid(kind);
        cube.n_positions = log.tasks[scored].events.size();
        cube.values.reserve(cube.priors.size() * cube.params.size() * cube.n_positions);
        for (std::size_t r = 0; r < cube.priors.size(); ++r) {
            for (const auto &p : cube.params) {
                const auto pl = trace_likelihoods(per_prior[r], p);
                cube.values.insert(cube.values.end(), pl.begin(), pl.end());
            }
        }
        cubes.push_back(std::move(cube));
    }
    return cubes;
}

IndividualResult crossval_individual(const std::string &participant_id,
                                     const std::string &condition_id,
                                     std::span<const LikelihoodCube> cubes, std::uint64_t seed) {
    if (cubes.empty()) {
        throw std::invalid_argument("no models to compare");
    }
    IndividualResult result;
    result.participant_id = participant_id;
    result.condition_id = condition_id;
    result.plan = intervention_folds(cubes.front().n_positions, seed);

    double best_mean = -1.0;
    for (const LikelihoodCube &cube : cubes) {
        ModelScore score;
        score.kind = cube.kind;
        std::vector<double> holdouts;
        for (int f = 0; f < kFoldCount; ++f) {
            std::vector<std::size_t> train;
            std::vector<std::size_t> hold;
            for (std::size_t k = 0; k < cube.n_positions; ++k) {
                (result.plan.fold_of_unit[k] == f ? hold : train).push_back(k);
            }
            auto score_on = [&](const std::vector<std::size_t> &positions, std::size_t c) {
                return marginal_mean(cube.priors.size(), [&](std::size_t r) {
                    double sum = 0.0;
                    for (std::size_t k : positions) {
                        sum += cube(r, c, k);
                    }
                    return std::pair{sum, positions.size()};
                });
            };
            const FitOutcome fitted =
                fit(cube.params.size(), [&](std::size_t c) { return score_on(train, c); });
            FoldFit ff;
            ff.params = cube.params[fitted.best];
            ff.train_score = fitted.best_score;
            ff.holdout_score = score_on(hold, fitted.best);
            ff.holdout_worst = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < cube.params.size(); ++c) {
                ff.holdout_worst = std::min(ff.holdout_worst, score_on(hold, c));
            }
            holdouts.push_back(ff.holdout_score);
            score.folds.push_back(ff);
        }
        score.mean = std::accumulate(holdouts.begin(), holdouts.end(), 0.0) / kFoldCount;
        score.stderr_ = sample_stderr(holdouts);
        if (score.mean > best_mean) {
            best_mean = score.mean;
            result.winner = cube.kind;
        }
        result.models.push_back(std::move(score));
    }
    return result;
}

IndividualResult crossval_individual(const ParticipantLog &log, const Condition &condition,
                                     std::uint64_t seed, std::span<const AgentKind> kinds,
                                     const EvaluationOptions &options) {
    const auto cubes = likelihood_cubes(log, condition, kinds, options);
    return crossval_individual(log.participant_id, condition.id, cubes, seed);
}

AveragedResult crossval_averaged(std::span<const std::vector<LikelihoodCube>> cubes,
                                 std::span<const std::string> strata, std::uint64_t seed,
                                 bool stratified) {
    if (cubes.size() != strata.size()) {
        throw std::invalid_argument("one stratum label per participant required");
    }
    AveragedResult result;
    result.plan = participant_folds(strata, seed, stratified);
    const std::size_t n_kinds = cubes.front().size();
    for (const auto &per_participant : cubes) {
        if (per_participant.size() != n_kinds) {
            throw std::invalid_argument("every participant needs the same model set");
        }
    }

    for (std::size_t m = 0; m < n_kinds; ++m) {
        const LikelihoodCube &shape = cubes.front()[m];
        ModelScore score;
        score.kind = shape.kind;
        auto score_on = [&](const std::vector<std::size_t> &participants, std::size_t c) {
            return marginal_mean(shape.priors.size(), [&](std::size_t r) {
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t p : participants) {
                    const LikelihoodCube &cube = cubes[p][m];
                    for (std::size_t k = 0; k < cube.n_positions; ++k) {
                        sum += cube(r, c, k);
                    }
                    count += cube.n_positions;
                }
                return std::pair{sum, count};
            });
        };
        std::vector<double> holdouts;
        std::vector<double> per_participant(cubes.size(), 0.0);
        for (int f = 0; f < kFoldCount; ++f) {
            const auto hold = result.plan.members(f);
            std::vector<std::size_t> train;
            for (std::size_t p = 0; p < cubes.size(); ++p) {
                if (result.plan.fold_of_unit[p] != f) {
                    train.push_back(p);
                }
            }
            const FitOutcome fitted =
                fit(shape.params.size(), [&](std::size_t c) { return score_on(train, c); });
            FoldFit ff;
            ff.params = shape.params[fitted.best];
            ff.train_score = fitted.best_score;
            ff.holdout_score = score_on(hold, fitted.best);
            ff.holdout_worst = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < shape.params.size(); ++c) {
                ff.holdout_worst = std::min(ff.holdout_worst, score_on(hold, c));
            }
            for (std::size_t p : hold) {
                per_participant[p] = score_on({p}, fitted.best);
            }
            holdouts.push_back(ff.holdout_score);
            score.folds.push_back(ff);
        }
        score.mean = std::accumulate(holdouts.begin(), holdouts.end(), 0.0) / kFoldCount;
        score.stderr_ = sample_stderr(per_participant);
        result.models.push_back(std::move(score));
    }
    std::vector<std::size_t> order(result.models.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return result.models[a].mean > result.models[b].mean;
    });
    for (std::size_t i : order) {
        result.ranking.push_back(result.models[i].kind);
    }
    return result;
}

namespace {

Condition condition_for(const ParticipantLog &log) {
    auto c = find_condition(log.condition_id);
    if (!c) {
        throw std::invalid_argument("unknown condition id: " + log.condition_id);
    }
    return *c;
}

std::uint64_t unit_seed(std::uint64_t seed, std::uint64_t unit) {
    return Rng(seed).fork(unit).next();
}

}  // namespace

std::vector<std::vector<LikelihoodCube>> build_cubes(std::span<const ParticipantLog> logs,
                                                     std::span<const AgentKind> kinds,
                                                     const EvaluationOptions &options) {
    std::vector<std::vector<LikelihoodCube>> cubes(logs.size());
    parallel_for(logs.size(), [&](std::size_t i) {
        cubes[i] = likelihood_cubes(logs[i], condition_for(logs[i]), kinds, options);
    });
    return cubes;
}

Comparison compare_models(std::span<const ParticipantLog> logs, std::uint64_t seed,
                          bool stratified, const EvaluationOptions &options) {
    const auto cubes = build_cubes(logs, kAgentKinds, options);
    std::vector<std::string> strata;
    for (const auto &log : logs) {
        strata.push_back(log.condition_id);
    }
    Comparison out;
    out.averaged = crossval_averaged(cubes, strata, seed, stratified);
    for (AgentKind k : kAgentKinds) {
        out.best_model_counts[k] = 0;
    }
    for (std::size_t i = 0; i < logs.size(); ++i) {
        out.individual.push_back(crossval_individual(logs[i].participant_id, logs[i].condition_id,
                                                     cubes[i], unit_seed(seed, i)));
        ++out.best_model_counts[out.individual.back().winner];
    }
    return out;
}

namespace {

nlohmann::json params_json(const PolicyParams &p) { return {{"t", p.t}, {"w", p.w}}; }

nlohmann::json folds_json(const ModelScore &s) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &f : s.folds) {
        out.push_back({{"params", params_json(f.params)},
                       {"train", f.train_score},
                       {"holdout", f.holdout_score},
                       {"holdout_worst", f.holdout_worst}});
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const Comparison &comparison) {
    nlohmann::json models = nlohmann::json::object();
    for (const auto &m : comparison.averaged.models) {
        models[std::string(to_string(m.kind))] = {
            {"mean", m.mean},
            {"stderr", m.stderr_},
            {"n_best_participants", comparison.best_model_counts.at(m.kind)},
            {"folds", folds_json(m)},
        };
    }
    nlohmann::json ranking = nlohmann::json::array();
    for (AgentKind k : comparison.averaged.ranking) {
        ranking.push_back(to_string(k));
    }
    nlohmann::json counts = nlohmann::json::object();
    for (const auto &[k, n] : comparison.best_model_counts) {
        counts[std::string(to_string(k))] = n;
    }
    nlohmann::json winners = nlohmann::json::array();
    for (const auto &ind : comparison.individual) {
        nlohmann::json scores = nlohmann::json::object();
        for (const auto &m : ind.models) {
            scores[std::string(to_string(m.kind))] = m.mean;
        }
        winners.push_back({{"participant_id", ind.participant_id},
                           {"condition_id", ind.condition_id},
                           {"winner", to_string(ind.winner)},
                           {"scores", std::move(scores)}});
    }
    return {
        {"models", std::move(models)},
        {"ranking", std::move(ranking)},
        {"best_model_counts", std::move(counts)},
        {"participants", std::move(winners)},
        {"fold_plan", comparison.averaged.plan.to_json()},
    };
}

int ConfusionMatrix::count(AgentKind generating, AgentKind recovered) const {
    const auto g = std::find(kinds.begin(), kinds.end(), generating);
    const auto r = std::find(kinds.begin(), kinds.end(), recovered);
    if (g == kinds.end() || r == kinds.end()) {
        return 0;
    }
    return counts[static_cast<std::size_t>(g - kinds.begin())]
                 [static_cast<std::size_t>(r - kinds.begin())];
}

nlohmann::json ConfusionMatrix::to_json() const {
    nlohmann::json out = nlohmann::json::object();
    for (AgentKind g : kinds) {
        nlohmann::json row = nlohmann::json::object();
        for (AgentKind r : kinds) {
            row[std::string(to_string(r))] = count(g, r);
        }
        out[std::string(to_string(g))] = std::move(row);
    }
    return {{"generating_by_recovered", std::move(out)}};
}

std::string ConfusionMatrix::to_csv() const {
    std::ostringstream os;
    os << "generating";
    for (AgentKind r : kinds) {
        os << ',' << to_string(r);
    }
    os << '\n';
    for (AgentKind g : kinds) {
        os << to_string(g);
        for (AgentKind r : kinds) {
            os << ',' << count(g, r);
        }
        os << '\n';
    }
    return os.str();
}

ConfusionMatrix model_recovery(int n_agents_per_model, std::span<const Condition> conditions,
                               const RecoveryOptions &options, const EvaluationOptions &eval) {
    if (n_agents_per_model < 1 || conditions.empty()) {
        throw std::invalid_argument("model recovery needs agents and conditions");
    }
    const std::size_t n_kinds = kAgentKinds.size();
    const std::size_t per = static_cast<std::size_t>(n_agents_per_model);
    std::vector<AgentKind> winners(n_kinds * per);
    parallel_for(winners.size(), [&](std::size_t i) {
        const AgentKind kind = kAgentKinds[i / per];
        const std::size_t a = i % per;
        Rng rng = Rng(options.seed).fork(i);
        const Condition &condition = conditions[a % conditions.size()];
        const int prior = 1 + static_cast<int>(rng.below(kPriorCount));
        const AgentSpec spec = make_spec(kind, prior, options.agent_params);
        const ParticipantLog log = run_condition(
            spec, condition, rng, std::string(to_string(kind)) + "-" + std::to_string(a));
        winners[i] = crossval_individual(log, condition, rng.next(), kAgentKinds, eval).winner;
    });
    ConfusionMatrix m;
    m.kinds.assign(kAgentKinds.begin(), kAgentKinds.end());
    m.counts.assign(n_kinds, std::vector<int>(n_kinds, 0));
    for (std::size_t i = 0; i < winners.size(); ++i) {
        const auto r = static_cast<std::size_t>(
            std::find(kAgentKinds.begin(), kAgentKinds.end(), winners[i]) - kAgentKinds.begin());
        ++m.counts[i / per][r];
    }
    return m;
}

std::string ScoreTable::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "model,prior_index,t,w,fold,unit,mean_likelihood,mean_log_likelihood,n\n";
    for (const auto &r : rows) {
        os << to_string(r.kind) << ',' << r.prior_index << ',' << r.params.t << ',' << r.params.w
           << ',' << r.fold << ',' << r.unit << ',' << r.mean_likelihood << ','
           << r.mean_log_likelihood << ',' << r.n << '\n';
    }
    return os.str();
}

ScoreTable score_logs(std::span<const ParticipantLog> logs, AgentKind kind,
                      std::span<const int> priors, std::span<const PolicyParams> params,
                      const EvaluationOptions &options) {
    std::vector<std::vector<ScoreRow>> per_log(logs.size());
    parallel_for(logs.size(), [&](std::size_t i) {
        const ParticipantLog &log = logs[i];
        const Condition condition = condition_for(log);
        for (int prior : priors) {
            const ScoringTrace trace =
                scoring_trace(make_spec(kind, prior), log, condition, condition.transfer_index(),
                              options);
            for (const PolicyParams &p : params) {
                const AgentSpec spec = make_spec(kind, prior, p);
                const auto pl = trace_likelihoods(trace, spec.params);
                double sum = 0.0;
                double log_sum = 0.0;
                for (double x : pl) {
                    sum += x;
                    log_sum += std::log(x);
                }
                const double n = static_cast<double>(pl.size());
                per_log[i].push_back({kind, prior, spec.params, "all", log.participant_id,
                                      pl.empty() ? 0.0 : sum / n,
                                      pl.empty() ? 0.0 : log_sum / n, pl.size()});
            }
        }
    });
    ScoreTable table;
    for (auto &rows : per_log) {
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    }
    return table;
}

}  // namespace blicket
