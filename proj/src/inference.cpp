#include "blicket/inference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace blicket {

BlockSet BlockSet::from_indices(std::span<const int> indices) {
    BlockSet out;
    for (int i : indices) {
        if (i < 0 || i >= 32) {
            throw std::invalid_argument("block index out of range: " + std::to_string(i));
        }
        out.bits |= 1u << i;
    }
    return out;
}

std::vector<int> BlockSet::indices() const {
    std::vector<int> out;
    for (int i = 0; i < 32; ++i) {
        if (contains(i)) {
            out.push_back(i);
        }
    }
    return out;
}

int BlockSet::size() const { return std::popcount(bits); }

ActivationTable::ActivationTable(std::span<const SigmoidForm> forms, int max_count, double clamp)
    : n_forms_(forms.size()), max_count_(max_count), clamp_(clamp) {
    if (!(clamp >= 0.0 && clamp < 0.5)) {
        throw std::invalid_argument("likelihood clamp must be in [0, 0.5)");
    }
    values_.reserve(forms.size() * static_cast<std::size_t>(max_count + 1));
    for (int k = 0; k <= max_count; ++k) {
        for (const auto &f : forms) {
            values_.push_back(std::clamp(activation_probability(f, k), clamp, 1.0 - clamp));
        }
    }
}

namespace {

void check_blocks(int n_blocks) {
    if (n_blocks < 1 || n_blocks > kMaxBlocks) {
        throw std::invalid_argument("block count must be in 1.." + std::to_string(kMaxBlocks) +
                                    ", got " + std::to_string(n_blocks));
    }
}

void check_event(const JointBelief &belief, const Event &event) {
    if ((event.intervention.bits >> belief.n_blocks()) != 0) {
        throw std::invalid_argument("intervention references blocks outside the task");
    }
}

// Renormalizes in place and returns the pre-normalization total.
double normalize(std::vector<double> &probs) {
    double total = 0.0;
    for (double p : probs) {
        total += p;
    }
    if (!(total >= 1e-300)) {
        throw DegenerateEvidence("evidence has vanishing probability under every hypothesis");
    }
    for (double &p : probs) {
        p /= total;
    }
    return total;
}

}  // namespace

JointBelief::JointBelief(int n_blocks, std::vector<SigmoidForm> forms, std::vector<double> probs,
                         double clamp)
    : n_blocks_(n_blocks) {
    check_blocks(n_blocks);
    if (forms.empty()) {
        throw std::invalid_argument("belief needs at least one form");
    }
    if (probs.size() != (std::size_t{1} << n_blocks) * forms.size()) {
        throw std::invalid_argument("belief table size does not match structures x forms");
    }
    forms_ = std::make_shared<const std::vector<SigmoidForm>>(std::move(forms));
    activation_ = std::make_shared<const ActivationTable>(*forms_, n_blocks, clamp);
    probs_ = std::move(probs);
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("belief entries must be finite and nonnegative");
        }
    }
    normalize(probs_);
}

JointBelief::JointBelief(int n_blocks, std::shared_ptr<const std::vector<SigmoidForm>> forms,
                         std::shared_ptr<const ActivationTable> activation,
                         std::vector<double> probs)
    : n_blocks_(n_blocks),
      forms_(std::move(forms)),
      activation_(std::move(activation)),
      probs_(std::move(probs)) {}

JointBelief uniform_structure_belief(int n_blocks, const FormPrior &form_prior, double clamp) {
    check_blocks(n_blocks);
    const std::size_t n_structures = std::size_t{1} << n_blocks;
    const double structure_mass = 1.0 / static_cast<double>(n_structures);
    std::vector<double> probs;
    probs.reserve(n_structures * form_prior.size());
    for (std::size_t s = 0; s < n_structures; ++s) {
        for (double w : form_prior.weights) {
            probs.push_back(structure_mass * w);
        }
    }
    return JointBelief(n_blocks, form_prior.forms, std::move(probs), clamp);
}

double likelihood(const Event &event, CausalStructure structure, const SigmoidForm &form,
                  double clamp) {
    const double p = std::clamp(
        activation_probability(form, overlap(event.intervention, structure)), clamp, 1.0 - clamp);
    return event.activated ? p : 1.0 - p;
}

JointBelief update(const JointBelief &belief, const Event &event) {
    check_event(belief, event);
    const std::size_t n_forms = belief.n_forms();
    const ActivationTable &act = belief.activation();
    std::vector<double> post(belief.probs().begin(), belief.probs().end());
    for (std::size_t s = 0; s < belief.n_structures(); ++s) {
        const int k = overlap(event.intervention, BlockSet{static_cast<std::uint32_t>(s)});
        const auto a = act.at_count(k);
        double *row = post.data() + s * n_forms;
        for (std::size_t f = 0; f < n_forms; ++f) {
            row[f] *= event.activated ? a[f] : 1.0 - a[f];
        }
    }
    normalize(post);
    return JointBelief(belief.n_blocks_, belief.forms_, belief.activation_, std::move(post));
}

JointBelief condition_on(const JointBelief &prior, std::span<const Event> events) {
    for (const auto &e : events) {
        check_event(prior, e);
    }
    const std::size_t n_forms = prior.n_forms();
    const ActivationTable &act = prior.activation();
    std::vector<double> log_post(prior.probs().size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < prior.n_structures(); ++s) {
        const CausalStructure structure{static_cast<std::uint32_t>(s)};
        for (std::size_t f = 0; f < n_forms; ++f) {
            const std::size_t cell = s * n_forms + f;
            double lp = std::log(prior.probs()[cell]);
            for (const auto &e : events) {
                const double a = act(f, overlap(e.intervention, structure));
                lp += std::log(e.activated ? a : 1.0 - a);
            }
            log_post[cell] = lp;
            max_log = std::max(max_log, lp);
        }
    }
    if (!std::isfinite(max_log)) {
        throw DegenerateEvidence("evidence has vanishing probability under every hypothesis");
    }
    for (double &lp : log_post) {
        lp = std::exp(lp - max_log);
    }
    normalize(log_post);
    return JointBelief(prior.n_blocks_, prior.forms_, prior.activation_, std::move(log_post));
}

FormPrior form_marginal(const JointBelief &belief) {
    const std::size_t n_forms = belief.n_forms();
    std::vector<double> weights(n_forms, 0.0);
    for (std::size_t s = 0; s < belief.n_structures(); ++s) {
        for (std::size_t f = 0; f < n_forms; ++f) {
            weights[f] += belief.prob(s, f);
        }
    }
    return {belief.forms(), std::move(weights)};
}

std::vector<double> structure_marginal(const JointBelief &belief) {
    const std::size_t n_forms = belief.n_forms();
    std::vector<double> out(belief.n_structures(), 0.0);
    for (std::size_t s = 0; s < belief.n_structures(); ++s) {
        double total = 0.0;
        for (std::size_t f = 0; f < n_forms; ++f) {
            total += belief.prob(s, f);
        }
        out[s] = total;
    }
    return out;
}

double blicket_probability(const JointBelief &belief, int block) {
    if (block < 0 || block >= belief.n_blocks()) {
        throw std::invalid_argument("block index outside the task: " + std::to_string(block));
    }
    const auto marginal = structure_marginal(belief);
    double p = 0.0;
    for (std::size_t s = 0; s < marginal.size(); ++s) {
        if ((s >> block) & 1u) {
            p += marginal[s];
        }
    }
    return p;
}

double entropy(std::span<const double> dist) {
    double h = 0.0;
    for (double p : dist) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

nlohmann::json to_json(const JointBelief &belief) {
    nlohmann::json structures = nlohmann::json::array();
    for (std::size_t s = 0; s < belief.n_structures(); ++s) {
        structures.push_back(s);
    }
    nlohmann::json forms = nlohmann::json::array();
    for (const auto &f : belief.forms()) {
        forms.push_back({f.bias, f.gain});
    }
    return {
        {"n_blocks", belief.n_blocks()},
        {"clamp", belief.clamp()},
        {"structures", std::move(structures)},
        {"forms", std::move(forms)},
        {"probs", std::vector<double>(belief.probs().begin(), belief.probs().end())},
    };
}

JointBelief belief_from_json(const nlohmann::json &j) {
    std::vector<SigmoidForm> forms;
    for (const auto &f : j.at("forms")) {
        forms.push_back({f.at(0).get<double>(), f.at(1).get<double>()});
    }
    const int n_blocks = j.at("n_blocks").get<int>();
    const auto structures = j.at("structures").get<std::vector<std::uint32_t>>();
    if (structures.size() != (std::size_t{1} << n_blocks)) {
        throw std::invalid_argument("belief snapshot does not enumerate every structure");
    }
    for (std::size_t s = 0; s < structures.size(); ++s) {
        if (structures[s] != s) {
            throw std::invalid_argument("belief snapshot structures are not in bitmask order");
        }
    }
    return JointBelief(n_blocks, std::move(forms), j.at("probs").get<std::vector<double>>(),
                       j.value("clamp", kDefaultClamp));
}

}  // namespace blicket
