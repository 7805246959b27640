#include "blicket/agents.hpp"

#include <stdexcept>

namespace blicket {

std::string_view to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::HBM:
            return "hbm";
        case AgentKind::NoTransfer:
            return "no-transfer";
        case AgentKind::StructureOnlyEIG:
            return "structure-only-eig";
        case AgentKind::FixedForm:
            return "fixed-form";
        case AgentKind::Random:
            return "random";
    }
    return "?";
}

AgentKind parse_agent_kind(std::string_view text) {
    for (AgentKind k : kAgentKinds) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw std::invalid_argument("unknown model kind: " + std::string(text));
}

bool uses_prior_grid(AgentKind kind) {
    return kind == AgentKind::HBM || kind == AgentKind::NoTransfer ||
           kind == AgentKind::StructureOnlyEIG;
}

AgentSpec make_spec(AgentKind kind, int prior_index, PolicyParams params) {
    AgentSpec spec;
    spec.kind = kind;
    spec.prior_index = uses_prior_grid(kind) ? prior_index : 1;
    spec.params = params;
    if (kind == AgentKind::StructureOnlyEIG) {
        spec.params.w = 0.0;
    }
    return spec;
}

void validate(const AgentSpec &spec) {
    if (spec.kind == AgentKind::Random) {
        return;
    }
    validate(spec.params);
    if (uses_prior_grid(spec.kind)) {
        prior_row(spec.prior_index);
    }
    if (spec.kind == AgentKind::StructureOnlyEIG && spec.params.w != 0.0) {
        throw std::invalid_argument("structure-only-eig agents use w = 0");
    }
}

FormPrior initial_form_prior(const AgentSpec &spec) {
    if (spec.kind == AgentKind::FixedForm || spec.kind == AgentKind::Random) {
        return point_mass(canonical_form(CanonicalName::Disjunctive));
    }
    return discretized_prior(spec.prior_index);
}

namespace {

bool keeps_belief(const AgentSpec &spec) {
    return spec.kind != AgentKind::Random || spec.track_belief;
}

}  // namespace

AgentState init_agent(const AgentSpec &spec, int n_blocks, int limit) {
    validate(spec);
    AgentState state;
    state.spec = spec;
    state.n_blocks = n_blocks;
    state.limit = limit;
    if (keeps_belief(spec)) {
        state.belief = uniform_structure_belief(n_blocks, initial_form_prior(spec), spec.clamp);
    } else if (n_blocks < 1 || n_blocks > kMaxBlocks) {
        throw std::invalid_argument("block count out of range");
    }
    return state;
}

AgentState begin_task(const AgentState &state, int n_blocks, int limit) {
    AgentState next;
    next.spec = state.spec;
    next.n_blocks = n_blocks;
    next.limit = limit;
    if (!keeps_belief(state.spec)) {
        if (n_blocks < 1 || n_blocks > kMaxBlocks) {
            throw std::invalid_argument("block count out of range");
        }
        return next;
    }
    if (state.spec.kind == AgentKind::NoTransfer) {
        next.belief = uniform_structure_belief(n_blocks, initial_form_prior(state.spec),
                                               state.spec.clamp);
        return next;
    }
    next.carried_form_marginal = form_marginal(*state.belief);
    next.belief = uniform_structure_belief(n_blocks, *next.carried_form_marginal, state.spec.clamp);
    return next;
}

AgentState observe(const AgentState &state, const Event &event) {
    if ((event.intervention.bits >> state.n_blocks) != 0) {
        throw std::invalid_argument("intervention references blocks outside the task");
    }
    AgentState next = state;
    if (next.belief) {
        next.belief = update(*state.belief, event);
    }
    next.history.push_back(event);
    return next;
}

std::vector<double> policy_distribution(const AgentState &state) {
    if (state.spec.kind == AgentKind::Random) {
        return random_policy(state.n_blocks);
    }
    const EigTable table = eig_table(*state.belief);
    return softmax_policy(table.combined(state.spec.params.w), state.spec.params.t);
}

Intervention choose_intervention(const AgentState &state, Rng &rng) {
    if (static_cast<int>(state.history.size()) >= state.limit) {
        throw std::logic_error("intervention limit reached for this task");
    }
    return sample_intervention(policy_distribution(state), rng);
}

ParticipantLog run_condition(const AgentSpec &spec, const Condition &condition, Rng &rng,
                             std::string participant_id) {
    ParticipantLog log;
    log.participant_id = std::move(participant_id);
    log.condition_id = condition.id;
    std::optional<AgentState> state;
    for (const auto &task : condition.tasks) {
        state = state ? begin_task(*state, task.n_blocks, task.intervention_limit)
                      : init_agent(spec, task.n_blocks, task.intervention_limit);
        TaskLog task_log;
        task_log.role = task.role;
        for (int trial = 1; trial <= task.intervention_limit; ++trial) {
            const Intervention q = choose_intervention(*state, rng);
            const Event event{q, machine_response(task, q, rng)};
            state = observe(*state, event);
            task_log.events.push_back({trial, event, std::nullopt});
        }
        log.tasks.push_back(std::move(task_log));
    }
    return log;
}

}  // namespace blicket
