#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blicket/forms.hpp"
#include "blicket/inference.hpp"
#include "blicket/log.hpp"
#include "blicket/policy.hpp"
#include "blicket/random.hpp"
#include "blicket/tasks.hpp"

namespace blicket {

enum class AgentKind { HBM, NoTransfer, StructureOnlyEIG, FixedForm, Random };

inline constexpr std::array<AgentKind, 5> kAgentKinds = {
    AgentKind::HBM, AgentKind::NoTransfer, AgentKind::StructureOnlyEIG, AgentKind::FixedForm,
    AgentKind::Random,
};

// "hbm", "no-transfer", "structure-only-eig", "fixed-form", "random"
std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view text);

bool uses_prior_grid(AgentKind kind);

struct AgentSpec {
    AgentKind kind = AgentKind::HBM;
    // 1-based row of prior_grid(); unused by FixedForm and Random.
    int prior_index = 1;
    PolicyParams params;
    double clamp = kDefaultClamp;
    // Random agents keep no belief unless this is set.
    bool track_belief = false;
};

// Fills in the kind's fixed choices (w = 0 for StructureOnlyEIG).
AgentSpec make_spec(AgentKind kind, int prior_index = 1, PolicyParams params = {});

// Throws std::invalid_argument for a spec that violates its kind's rules.
void validate(const AgentSpec &spec);

// The form prior the agent starts every task with before any transfer.
FormPrior initial_form_prior(const AgentSpec &spec);

inline constexpr int kNoLimit = std::numeric_limits<int>::max();

struct AgentState {
    AgentSpec spec;
    int n_blocks = 0;
    int limit = kNoLimit;
    std::optional<JointBelief> belief;
    std::vector<Event> history;
    // Form marginal carried into the current task; empty before any transfer.
    std::optional<FormPrior> carried_form_marginal;
};

AgentState init_agent(const AgentSpec &spec, int n_blocks, int limit = kNoLimit);

// Starts a new task: fresh uniform structure prior times the carried form
// marginal (or the initial prior for NoTransfer). Clears the history.
AgentState begin_task(const AgentState &state, int n_blocks, int limit = kNoLimit);

AgentState observe(const AgentState &state, const Event &event);

// The agent's choice distribution over candidate_set(n_blocks).
std::vector<double> policy_distribution(const AgentState &state);

// Throws std::logic_error once the history reaches the task limit.
Intervention choose_intervention(const AgentState &state, Rng &rng);

// Plays every task of the condition to its limit against the ground-truth
// machine, transferring between tasks.
ParticipantLog run_condition(const AgentSpec &spec, const Condition &condition, Rng &rng,
                             std::string participant_id = "agent");

}  // namespace blicket
