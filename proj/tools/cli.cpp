#include "cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "blicket/agents.hpp"
#include "blicket/evaluation.hpp"
#include "blicket/log_io.hpp"
#include "blicket/session.hpp"
#include "blicket/tasks.hpp"

namespace blicket::cli {

namespace {

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    int experiment = 2;
    std::string condition;
    std::string model = "hbm";
    std::optional<int> prior;
    std::optional<double> w;
    std::optional<double> t;
    std::uint64_t seed = 0;
    std::string logs;
    std::string out;
    std::string format;
    int n = 1;
    int recover_n = 20;
    int cap = kExp1DefaultCap;
    bool unstratified = false;
    bool lenient = false;
    bool allow_large = false;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string checkpoint_dir;
    std::string static_dir;
};

Experiment experiment_of(const Flags &f) {
    if (f.experiment != 1 && f.experiment != 2) {
        throw UsageError("--experiment must be 1 or 2");
    }
    return static_cast<Experiment>(f.experiment);
}

std::vector<Condition> experiment_conditions(const Flags &f) {
    return experiment_of(f) == Experiment::One ? exp1_conditions(f.cap) : exp2_conditions();
}

std::vector<Condition> selected_conditions(const Flags &f) {
    auto all = experiment_conditions(f);
    if (f.condition.empty()) {
        return all;
    }
    for (auto &c : all) {
        if (c.id == f.condition) {
            return {std::move(c)};
        }
    }
    throw UsageError("unknown condition \"" + f.condition + "\" for experiment " +
                     std::to_string(f.experiment));
}

AgentKind model_of(const Flags &f) {
    try {
        return parse_agent_kind(f.model);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
}

nlohmann::json flags_json(const std::string &command, const Flags &f) {
    nlohmann::json j = {
        {"command", command}, {"experiment", f.experiment}, {"condition", f.condition},
        {"model", f.model},   {"seed", f.seed},             {"logs", f.logs},
        {"format", f.format}, {"n", command == "recover" ? f.recover_n : f.n},                   {"cap", f.cap},
        {"unstratified", f.unstratified},                   {"allow_large", f.allow_large},
    };
    j["prior"] = f.prior ? nlohmann::json(*f.prior) : nlohmann::json(nullptr);
    j["w"] = f.w ? nlohmann::json(*f.w) : nlohmann::json(nullptr);
    j["t"] = f.t ? nlohmann::json(*f.t) : nlohmann::json(nullptr);
    return j;
}

std::vector<ParticipantLog> load_logs(const Flags &f) {
    if (f.logs.empty()) {
        throw UsageError("--logs is required");
    }
    IngestResult r = ingest(std::filesystem::path(f.logs), f.lenient);
    for (const auto &d : r.rejects) {
        std::cerr << "warning: skipped line " << d.line << ": " << d.message << '\n';
    }
    return std::move(r.logs);
}

EvaluationOptions eval_options(const Flags &f) {
    EvaluationOptions o;
    o.allow_large_tasks = f.allow_large;
    return o;
}

// Writes `contents` to --out (atomically, with a manifest sidecar unless the
// manifest is embedded) or to stdout.
void emit(const Flags &f, std::ostream &out, const std::string &contents,
          const RunManifest *sidecar) {
    if (f.out.empty()) {
        out << contents;
        return;
    }
    write_atomic(f.out, contents);
    if (sidecar) {
        write_atomic(manifest_path(f.out), sidecar->to_json().dump(2) + "\n");
    }
}

int simulate(const Flags &f, std::ostream &out) {
    const AgentKind kind = model_of(f);
    const auto conds = selected_conditions(f);
    if (f.n < 1) {
        throw UsageError("--n must be positive");
    }
    const PolicyParams params{f.w.value_or(0.5), f.t.value_or(0.01)};
    const int prior = f.prior.value_or(1);
    AgentSpec spec = make_spec(kind, prior, params);
    try {
        validate(spec);
    } catch (const std::exception &e) {
        throw UsageError(e.what());
    }
    std::vector<ParticipantLog> logs;
    const Rng root(f.seed);
    std::uint64_t stream = 0;
    for (const auto &c : conds) {
        for (int i = 0; i < f.n; ++i) {
            Rng rng = root.fork(stream++);
            logs.push_back(run_condition(
                spec, c, rng,
                "sim-" + std::string(to_string(kind)) + "-" + c.id + "-" + std::to_string(i)));
        }
    }
    const RunManifest manifest = make_manifest("simulate", f.seed, flags_json("simulate", f));
    emit(f, out, export_jsonl(logs), &manifest);
    return kOk;
}

int score(const Flags &f, std::ostream &out) {
    const AgentKind kind = model_of(f);
    const auto logs = load_logs(f);
    std::vector<int> priors = f.prior ? std::vector<int>{*f.prior} : prior_indices(kind);
    for (int p : priors) {
        if (p < 1 || p > kPriorCount) {
            throw UsageError("--prior must be in 1..24");
        }
    }
    std::vector<PolicyParams> params;
    if (f.t || f.w) {
        params.push_back({f.w.value_or(kind == AgentKind::StructureOnlyEIG ? 0.0 : 0.5),
                          f.t.value_or(1.0)});
        try {
            validate(make_spec(kind, priors.front(), params.front()));
        } catch (const std::exception &e) {
            throw UsageError(e.what());
        }
    } else {
        params = parameter_grid(kind);
    }
    const ScoreTable table = score_logs(logs, kind, priors, params, eval_options(f));
    const RunManifest manifest = make_manifest("score", f.seed, flags_json("score", f));
    if (f.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : table.rows) {
            rows.push_back({{"model", to_string(r.kind)},
                            {"prior_index", r.prior_index},
                            {"t", r.params.t},
                            {"w", r.params.w},
                            {"fold", r.fold},
                            {"unit", r.unit},
                            {"mean_likelihood", r.mean_likelihood},
                            {"mean_log_likelihood", r.mean_log_likelihood},
                            {"n", r.n}});
        }
        emit(f, out, nlohmann::json{{"manifest", manifest.to_json()}, {"rows", rows}}.dump(2) + "\n",
             nullptr);
    } else {
        emit(f, out, table.to_csv(), &manifest);
    }
    return kOk;
}

int compare(const Flags &f, std::ostream &out) {
    const auto logs = load_logs(f);
    const Comparison cmp = compare_models(logs, f.seed, !f.unstratified, eval_options(f));
    RunManifest manifest = make_manifest("compare", f.seed, flags_json("compare", f));
    manifest.fold_plan = cmp.averaged.plan.to_json();
    if (f.format == "csv") {
        std::ostringstream os;
        os << "participant_id,condition_id,winner";
        for (AgentKind k : kAgentKinds) {
            os << ',' << to_string(k);
        }
        os << '\n' << std::setprecision(17);
        for (const auto &ind : cmp.individual) {
            os << ind.participant_id << ',' << ind.condition_id << ',' << to_string(ind.winner);
            for (const auto &m : ind.models) {
                os << ',' << m.mean;
            }
            os << '\n';
        }
        emit(f, out, os.str(), &manifest);
    } else {
        nlohmann::json j = to_json(cmp);
        j["manifest"] = manifest.to_json();
        emit(f, out, j.dump(2) + "\n", nullptr);
    }
    return kOk;
}

int recover(const Flags &f, std::ostream &out) {
    if (f.recover_n < 1) {
        throw UsageError("--n must be positive");
    }
    const auto conds = selected_conditions(f);
    RecoveryOptions options;
    options.seed = f.seed;
    options.agent_params = {f.w.value_or(0.5), f.t.value_or(0.01)};
    const ConfusionMatrix m = model_recovery(f.recover_n, conds, options, eval_options(f));
    const RunManifest manifest = make_manifest("recover", f.seed, flags_json("recover", f));
    if (f.format == "csv") {
        emit(f, out, m.to_csv(), &manifest);
    } else {
        nlohmann::json j = m.to_json();
        j["manifest"] = manifest.to_json();
        emit(f, out, j.dump(2) + "\n", nullptr);
    }
    return kOk;
}

int serve(const Flags &f, std::ostream &out) {
    std::optional<std::filesystem::path> checkpoints;
    if (!f.checkpoint_dir.empty()) {
        checkpoints = f.checkpoint_dir;
    }
    SessionManager manager(checkpoints);
    httplib::Server server;
    register_routes(server, manager);
    if (!f.static_dir.empty() && !server.set_mount_point("/", f.static_dir)) {
        throw UsageError("cannot serve static files from " + f.static_dir);
    }
    out << "listening on http://" << f.host << ':' << f.port << std::endl;
    if (!server.listen(f.host, f.port)) {
        throw std::runtime_error("cannot bind " + f.host + ":" + std::to_string(f.port));
    }
    return kOk;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Hierarchical Bayesian active causal learning: simulate, score and compare "
                 "models of blicket-task interventions"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--experiment", f.experiment, "Experiment (1 or 2)")
            ->check(CLI::IsMember({1, 2}));
        cmd->add_option("--seed", f.seed, "Random seed");
        cmd->add_option("--out", f.out, "Output file (default: stdout)");
        cmd->add_option("--format", f.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--allow-large", f.allow_large, "Allow scoring tasks with more than 6 blocks");
    };
    auto add_model = [&](CLI::App *cmd) {
        cmd->add_option("--model", f.model,
                        "hbm | no-transfer | structure-only-eig | fixed-form | random");
        cmd->add_option("--prior", f.prior, "Prior row 1..24");
        cmd->add_option("--w", f.w, "Form-information weight in [0, 1]");
        cmd->add_option("--t", f.t, "Softmax temperature");
    };

    auto *sim = app.add_subcommand("simulate", "Simulate agents and write JSONL logs");
    add_common(sim);
    add_model(sim);
    sim->add_option("--condition", f.condition, "Condition id (default: every condition)");
    sim->add_option("--n", f.n, "Agents per condition");
    sim->add_option("--cap", f.cap, "Experiment 1 intervention budget per task");

    auto *sc = app.add_subcommand("score", "Predictive likelihood table for logged interventions");
    add_common(sc);
    add_model(sc);
    sc->add_option("--logs", f.logs, "JSONL log file")->required();
    sc->add_flag("--lenient", f.lenient, "Skip invalid records instead of failing");

    auto *cmp = app.add_subcommand("compare", "Cross-validated model comparison");
    add_common(cmp);
    cmp->add_option("--logs", f.logs, "JSONL log file")->required();
    cmp->add_flag("--unstratified", f.unstratified, "Do not stratify folds by condition");
    cmp->add_flag("--lenient", f.lenient, "Skip invalid records instead of failing");

    auto *rec = app.add_subcommand("recover", "Synthetic model-recovery confusion matrix");
    add_common(rec);
    rec->add_option("--condition", f.condition, "Condition id (default: every condition)");
    rec->add_option("--n", f.recover_n, "Agents per model kind");
    rec->add_option("--w", f.w, "Agent weight");
    rec->add_option("--t", f.t, "Agent temperature");

    auto *srv = app.add_subcommand("serve", "Start the session HTTP service");
    srv->add_option("--host", f.host, "Bind address");
    srv->add_option("--port", f.port, "Port");
    srv->add_option("--checkpoint-dir", f.checkpoint_dir, "Directory for session checkpoints");
    srv->add_option("--static", f.static_dir, "Directory of static UI files to serve at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*sim) return simulate(f, out);
        if (*sc) return score(f, out);
        if (*cmp) return compare(f, out);
        if (*rec) return recover(f, out);
        if (*srv) return serve(f, out);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const IngestError &e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

}  // namespace blicket::cli
