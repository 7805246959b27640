#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blicket/forms.hpp"
#include "blicket/inference.hpp"
#include "blicket/random.hpp"

namespace blicket {

enum class TaskRole { Training1, Training2, Transfer };

std::string_view to_string(TaskRole role);
TaskRole parse_task_role(std::string_view text);

// Ground-truth machine for one task.
struct TaskConfig {
    int n_blocks = 0;
    CausalStructure blickets;
    // Named canonical form, or nullopt for a custom (bias, gain).
    std::optional<CanonicalName> form_name;
    SigmoidForm form;
    int intervention_limit = 0;
    TaskRole role = TaskRole::Transfer;
};

enum class Experiment { One = 1, Two = 2 };

struct Condition {
    Experiment experiment = Experiment::Two;
    std::string id;
    std::vector<TaskConfig> tasks;

    const TaskConfig &transfer_task() const { return tasks.back(); }
    std::size_t transfer_index() const { return tasks.size() - 1; }
};

inline constexpr int kExp2TrainingLimit = 12;
inline constexpr int kExp2TransferLimit = 20;
// Experiment 1 ran on a wall-clock limit; simulations use this budget.
inline constexpr int kExp1DefaultCap = 40;

// Builds a task whose blickets are the first `n_blickets` blocks.
TaskConfig make_task(int n_blocks, int n_blickets, CanonicalName form, int limit, TaskRole role);

// Ids: "{short|long}-{disj|conj}-{same|diff}", named by training length,
// transfer form and whether training matched the transfer form.
std::vector<Condition> exp1_conditions(int intervention_cap = kExp1DefaultCap);

// Ids: "disj", "noisy-disj", "conj", "noisy-conj", "3conj", "noisy-3conj",
// named by training form. Transfer is always deterministic conjunctive.
std::vector<Condition> exp2_conditions();

std::vector<Condition> conditions(Experiment experiment);

// Looks a condition up in either experiment; ids are unique across both.
std::optional<Condition> find_condition(std::string_view id);

// Samples the machine's binary response.
bool machine_response(const TaskConfig &config, Intervention q, Rng &rng);

// Cosmetic layout: slot j shows block block_at_slot[j] labeled letters[j].
// Letters run alphabetically over slots.
struct Presentation {
    std::vector<int> block_at_slot;
    std::vector<std::string> letters;
    std::vector<std::string> colors;
};

Presentation counterbalance(const TaskConfig &config, Rng &rng);

nlohmann::json to_json(const TaskConfig &task);
TaskConfig task_from_json(const nlohmann::json &j);
nlohmann::json to_json(const Condition &condition);
Condition condition_from_json(const nlohmann::json &j);

}  // namespace blicket
