#include "blicket/tasks.hpp"

#include <array>
#include <numeric>
#include <stdexcept>

namespace blicket {

std::string_view to_string(TaskRole role) {
    switch (role) {
        case TaskRole::Training1:
            return "training1";
        case TaskRole::Training2:
            return "training2";
        case TaskRole::Transfer:
            return "transfer";
    }
    return "?";
}

TaskRole parse_task_role(std::string_view text) {
    for (TaskRole r : {TaskRole::Training1, TaskRole::Training2, TaskRole::Transfer}) {
        if (to_string(r) == text) {
            return r;
        }
    }
    throw std::invalid_argument("unknown task role: " + std::string(text));
}

TaskConfig make_task(int n_blocks, int n_blickets, CanonicalName form, int limit, TaskRole role) {
    if (n_blickets < 0 || n_blickets > n_blocks) {
        throw std::invalid_argument("blicket count must not exceed block count");
    }
    TaskConfig t;
    t.n_blocks = n_blocks;
    t.blickets = BlockSet{(1u << n_blickets) - 1u};
    t.form_name = form;
    t.form = canonical_form(form);
    t.intervention_limit = limit;
    t.role = role;
    return t;
}

std::vector<Condition> exp1_conditions(int intervention_cap) {
    if (intervention_cap < 1) {
        throw std::invalid_argument("intervention cap must be positive");
    }
    struct Variant {
        const char *tag;
        CanonicalName form;
        int first_training_blickets;
    };
    const std::array<Variant, 2> forms = {{
        {"disj", CanonicalName::Disjunctive, 1},
        {"conj", CanonicalName::Conjunctive, 2},
    }};
    std::vector<Condition> out;
    for (const char *length : {"short", "long"}) {
        const bool long_training = std::string_view(length) == "long";
        for (std::size_t transfer = 0; transfer < forms.size(); ++transfer) {
            for (const char *match : {"same", "diff"}) {
                const bool same = std::string_view(match) == "same";
                const Variant &train = forms[same ? transfer : 1 - transfer];
                Condition c;
                c.experiment = Experiment::One;
                c.id = std::string(length) + "-" + forms[transfer].tag + "-" + match;
                c.tasks.push_back(make_task(3, train.first_training_blickets, train.form,
                                            intervention_cap, TaskRole::Training1));
                if (long_training) {
                    c.tasks.push_back(
                        make_task(6, 3, train.form, intervention_cap, TaskRole::Training2));
                }
                c.tasks.push_back(
                    make_task(9, 4, forms[transfer].form, intervention_cap, TaskRole::Transfer));
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<Condition> exp2_conditions() {
    struct Variant {
        const char *id;
        CanonicalName form;
        int blickets;
    };
    const std::array<Variant, 6> variants = {{
        {"disj", CanonicalName::Disjunctive, 1},
        {"noisy-disj", CanonicalName::NoisyDisjunctive, 1},
        {"conj", CanonicalName::Conjunctive, 2},
        {"noisy-conj", CanonicalName::NoisyConjunctive, 2},
        {"3conj", CanonicalName::ThreeConjunctive, 3},
        {"noisy-3conj", CanonicalName::NoisyThreeConjunctive, 3},
    }};
    std::vector<Condition> out;
    for (const auto &v : variants) {
        Condition c;
        c.experiment = Experiment::Two;
        c.id = v.id;
        c.tasks.push_back(make_task(3, v.blickets, v.form, kExp2TrainingLimit, TaskRole::Training1));
        c.tasks.push_back(
            make_task(6, 3, CanonicalName::Conjunctive, kExp2TransferLimit, TaskRole::Transfer));
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Condition> conditions(Experiment experiment) {
    return experiment == Experiment::One ? exp1_conditions() : exp2_conditions();
}

std::optional<Condition> find_condition(std::string_view id) {
    for (Experiment e : {Experiment::Two, Experiment::One}) {
        for (auto &c : conditions(e)) {
            if (c.id == id) {
                return c;
            }
        }
    }
    return std::nullopt;
}

bool machine_response(const TaskConfig &config, Intervention q, Rng &rng) {
    if ((q.bits >> config.n_blocks) != 0) {
        throw std::invalid_argument("intervention references blocks outside the task");
    }
    return rng.uniform() < activation_probability(config.form, overlap(q, config.blickets));
}

Presentation counterbalance(const TaskConfig &config, Rng &rng) {
    static constexpr std::array<const char *, 12> kPalette = {
        "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
        "#42d4f4", "#f032e6", "#bfef45", "#fabed4", "#469990", "#9a6324",
    };
    if (config.n_blocks > static_cast<int>(kPalette.size())) {
        throw std::invalid_argument("not enough colors for this many blocks");
    }
    Presentation p;
    p.block_at_slot.resize(static_cast<std::size_t>(config.n_blocks));
    std::iota(p.block_at_slot.begin(), p.block_at_slot.end(), 0);
    rng.shuffle(p.block_at_slot);

    std::vector<std::size_t> palette(kPalette.size());
    std::iota(palette.begin(), palette.end(), std::size_t{0});
    rng.shuffle(palette);
    for (int j = 0; j < config.n_blocks; ++j) {
        p.letters.emplace_back(1, static_cast<char>('A' + j));
        p.colors.emplace_back(kPalette[palette[static_cast<std::size_t>(j)]]);
    }
    return p;
}

nlohmann::json to_json(const TaskConfig &task) {
    nlohmann::json form;
    if (task.form_name) {
        form = {{"name", to_string(*task.form_name)}};
    } else {
        form = {{"bias", task.form.bias}, {"gain", task.form.gain}};
    }
    return {
        {"role", to_string(task.role)},
        {"n_blocks", task.n_blocks},
        {"blickets", task.blickets.indices()},
        {"form", std::move(form)},
        {"limit", task.intervention_limit},
    };
}

TaskConfig task_from_json(const nlohmann::json &j) {
    TaskConfig t;
    t.n_blocks = j.at("n_blocks").get<int>();
    if (t.n_blocks < 1 || t.n_blocks > kMaxBlocks) {
        throw std::invalid_argument("task n_blocks out of range");
    }
    const auto blickets = j.at("blickets").get<std::vector<int>>();
    for (int b : blickets) {
        if (b < 0 || b >= t.n_blocks) {
            throw std::invalid_argument("blicket index outside the task");
        }
    }
    t.blickets = BlockSet::from_indices(blickets);
    const auto &form = j.at("form");
    if (form.contains("name")) {
        t.form_name = parse_canonical_name(form.at("name").get<std::string>());
        t.form = canonical_form(*t.form_name);
    } else {
        t.form = {form.at("bias").get<double>(), form.at("gain").get<double>()};
    }
    t.intervention_limit = j.at("limit").get<int>();
    t.role = parse_task_role(j.value("role", std::string("transfer")));
    return t;
}

nlohmann::json to_json(const Condition &condition) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto &t : condition.tasks) {
        tasks.push_back(to_json(t));
    }
    return {
        {"experiment", static_cast<int>(condition.experiment)},
        {"condition_id", condition.id},
        {"tasks", std::move(tasks)},
    };
}

Condition condition_from_json(const nlohmann::json &j) {
    Condition c;
    const int e = j.at("experiment").get<int>();
    if (e != 1 && e != 2) {
        throw std::invalid_argument("experiment must be 1 or 2");
    }
    c.experiment = static_cast<Experiment>(e);
    c.id = j.at("condition_id").get<std::string>();
    for (const auto &t : j.at("tasks")) {
        c.tasks.push_back(task_from_json(t));
    }
    if (c.tasks.empty()) {
        throw std::invalid_argument("condition has no tasks");
    }
    return c;
}

}  // namespace blicket
