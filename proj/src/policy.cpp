#include "blicket/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blicket {

void validate(const PolicyParams &params) {
    if (!(params.w >= 0.0 && params.w <= 1.0)) {
        throw std::invalid_argument("policy weight w must be in [0, 1]");
    }
    if (!(params.t > 0.0) || !std::isfinite(params.t)) {
        throw std::invalid_argument("softmax temperature t must be positive");
    }
}

std::vector<Intervention> candidate_set(int n_blocks) {
    std::vector<Intervention> out(candidate_count(n_blocks));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = Intervention{static_cast<std::uint32_t>(i)};
    }
    return out;
}

namespace {

void check_candidate(const JointBelief &belief, Intervention q) {
    if ((q.bits >> belief.n_blocks()) != 0) {
        throw std::invalid_argument("intervention references blocks outside the task");
    }
}

// Joint mass split by outcome, marginalized onto structures and forms.
struct OutcomeSplit {
    std::vector<double> structures_on;
    std::vector<double> structures_off;
    std::vector<double> forms_on;
    std::vector<double> forms_off;
    double p_on = 0.0;
    double p_off = 0.0;
};

void split_by_outcome(const JointBelief &belief, Intervention q, OutcomeSplit &out) {
    const std::size_t n_s = belief.n_structures();
    const std::size_t n_f = belief.n_forms();
    out.structures_on.assign(n_s, 0.0);
    out.structures_off.assign(n_s, 0.0);
    out.forms_on.assign(n_f, 0.0);
    out.forms_off.assign(n_f, 0.0);
    const auto probs = belief.probs();
    for (std::size_t s = 0; s < n_s; ++s) {
        const int k = overlap(q, BlockSet{static_cast<std::uint32_t>(s)});
        const auto act = belief.activation().at_count(k);
        const double *row = probs.data() + s * n_f;
        double on = 0.0;
        double off = 0.0;
        for (std::size_t f = 0; f < n_f; ++f) {
            const double m_on = row[f] * act[f];
            const double m_off = row[f] * (1.0 - act[f]);
            out.forms_on[f] += m_on;
            out.forms_off[f] += m_off;
            on += m_on;
            off += m_off;
        }
        out.structures_on[s] = on;
        out.structures_off[s] = off;
    }
    double p_on = 0.0;
    double p_off = 0.0;
    for (std::size_t s = 0; s < n_s; ++s) {
        p_on += out.structures_on[s];
        p_off += out.structures_off[s];
    }
    out.p_on = p_on;
    out.p_off = p_off;
}

// Entropy (bits) of mass / total.
double conditional_entropy(std::span<const double> mass, double total) {
    if (!(total > 0.0)) {
        return 0.0;
    }
    double h = 0.0;
    for (double m : mass) {
        if (m > 0.0) {
            const double p = m / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double gain(double prior_entropy, std::span<const double> on, std::span<const double> off,
            double p_on, double p_off) {
    const double total = p_on + p_off;
    return prior_entropy - (p_on / total) * conditional_entropy(on, p_on) -
           (p_off / total) * conditional_entropy(off, p_off);
}

}  // namespace

double outcome_predictive(const JointBelief &belief, Intervention q) {
    check_candidate(belief, q);
    const std::size_t n_f = belief.n_forms();
    const auto probs = belief.probs();
    double p = 0.0;
    for (std::size_t s = 0; s < belief.n_structures(); ++s) {
        const auto act = belief.activation().at_count(overlap(q, BlockSet{static_cast<std::uint32_t>(s)}));
        const double *row = probs.data() + s * n_f;
        for (std::size_t f = 0; f < n_f; ++f) {
            p += row[f] * act[f];
        }
    }
    return p;
}

double eig(const JointBelief &belief, Intervention q, EigTarget target) {
    check_candidate(belief, q);
    OutcomeSplit split;
    split_by_outcome(belief, q, split);
    if (target == EigTarget::Structures) {
        return gain(entropy(structure_marginal(belief)), split.structures_on, split.structures_off,
                    split.p_on, split.p_off);
    }
    return gain(entropy(form_marginal(belief).weights), split.forms_on, split.forms_off, split.p_on,
                split.p_off);
}

double combined_eig(const JointBelief &belief, Intervention q, double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw std::invalid_argument("policy weight w must be in [0, 1]");
    }
    return w * eig(belief, q, EigTarget::Forms) + (1.0 - w) * eig(belief, q, EigTarget::Structures);
}

std::vector<double> EigTable::combined(double w) const {
    std::vector<double> out(structures.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = w * forms[i] + (1.0 - w) * structures[i];
    }
    return out;
}

EigTable eig_table(const JointBelief &belief) {
    const std::size_t n = candidate_count(belief.n_blocks());
    const std::size_t n_s = belief.n_structures();
    const std::size_t n_f = belief.n_forms();
    const std::size_t n_k = static_cast<std::size_t>(belief.n_blocks()) + 1;
    const auto probs = belief.probs();
    const auto &act = belief.activation();
    const double h_structures = entropy(structure_marginal(belief));
    const double h_forms = entropy(form_marginal(belief).weights);

    // Per-structure outcome masses for each possible overlap count.
    std::vector<double> s_on(n_s * n_k, 0.0);
    std::vector<double> s_off(n_s * n_k, 0.0);
    for (std::size_t s = 0; s < n_s; ++s) {
        const double *row = probs.data() + s * n_f;
        const int size = BlockSet{static_cast<std::uint32_t>(s)}.size();
        for (int k = 0; k <= size; ++k) {
            const auto a = act.at_count(k);
            double on = 0.0;
            double off = 0.0;
            for (std::size_t f = 0; f < n_f; ++f) {
                on += row[f] * a[f];
                off += row[f] * (1.0 - a[f]);
            }
            s_on[s * n_k + k] = on;
            s_off[s * n_k + k] = off;
        }
    }

    EigTable table{std::vector<double>(n), std::vector<double>(n)};
    std::vector<double> by_count(n_k * n_f);
    std::vector<double> structures_on(n_s), structures_off(n_s);
    std::vector<double> forms_on(n_f), forms_off(n_f);
    for (std::size_t i = 0; i < n; ++i) {
        const Intervention q{static_cast<std::uint32_t>(i)};
        int max_k = 0;
        double p_on = 0.0;
        double p_off = 0.0;
        for (std::size_t s = 0; s < n_s; ++s) {
            const int k = overlap(q, BlockSet{static_cast<std::uint32_t>(s)});
            max_k = std::max(max_k, k);
            const double *row = probs.data() + s * n_f;
            double *acc = by_count.data() + static_cast<std::size_t>(k) * n_f;
            for (std::size_t f = 0; f < n_f; ++f) {
                acc[f] += row[f];
            }
            structures_on[s] = s_on[s * n_k + k];
            structures_off[s] = s_off[s * n_k + k];
            p_on += structures_on[s];
            p_off += structures_off[s];
        }
        std::fill(forms_on.begin(), forms_on.end(), 0.0);
        std::fill(forms_off.begin(), forms_off.end(), 0.0);
        for (int k = 0; k <= max_k; ++k) {
            const auto a = act.at_count(k);
            const double *acc = by_count.data() + static_cast<std::size_t>(k) * n_f;
            for (std::size_t f = 0; f < n_f; ++f) {
                forms_on[f] += acc[f] * a[f];
                forms_off[f] += acc[f] * (1.0 - a[f]);
            }
        }
        std::fill(by_count.begin(), by_count.begin() + (max_k + 1) * n_f, 0.0);
        table.structures[i] = gain(h_structures, structures_on, structures_off, p_on, p_off);
        table.forms[i] = gain(h_forms, forms_on, forms_off, p_on, p_off);
    }
    return table;
}

std::vector<double> softmax_policy(std::span<const double> scores, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("softmax temperature t must be positive");
    }
    if (scores.empty()) {
        throw std::invalid_argument("softmax needs at least one candidate");
    }
    double max_score = -std::numeric_limits<double>::infinity();
    for (double s : scores) {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("softmax scores must be finite");
        }
        max_score = std::max(max_score, s);
    }
    std::vector<double> out(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp((scores[i] - max_score) / t);
        total += out[i];
    }
    for (double &p : out) {
        p /= total;
    }
    return out;
}

std::vector<double> random_policy(int n_blocks) {
    const std::size_t n = candidate_count(n_blocks);
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

Intervention sample_intervention(std::span<const double> dist, Rng &rng) {
    if (dist.empty()) {
        throw std::invalid_argument("cannot sample from an empty distribution");
    }
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] > 0.0) {
            last_positive = i;
        }
        cumulative += dist[i];
        if (u < cumulative) {
            return Intervention{static_cast<std::uint32_t>(i)};
        }
    }
    // Rounding left the cumulative sum just below 1.
    return Intervention{static_cast<std::uint32_t>(last_positive)};
}

Intervention sample_intervention(std::span<const double> dist, std::uint64_t seed) {
    Rng rng(seed);
    return sample_intervention(dist, rng);
}

}  // namespace blicket
