#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "blicket/forms.hpp"
#include "blicket/inference.hpp"
#include "blicket/random.hpp"

namespace blicket::testing {

// Plain sigmoid, written out independently of the library.
inline double sigmoid(double bias, double gain, int n) {
    return 1.0 / (1.0 + std::exp(-gain * (static_cast<double>(n) - bias)));
}

inline int popcount(std::uint32_t x) {
    int c = 0;
    for (; x; x &= x - 1) ++c;
    return c;
}

inline double clamped(double p, double clamp) {
    return std::min(std::max(p, clamp), 1.0 - clamp);
}

// Brute-force posterior: prior(s, f) * prod of likelihoods, normalized once.
inline std::vector<double> brute_posterior(int n_blocks, const std::vector<SigmoidForm> &forms,
                                           const std::vector<double> &prior,
                                           const std::vector<Event> &events,
                                           double clamp = kDefaultClamp) {
    const std::size_t n_s = std::size_t{1} << n_blocks;
    std::vector<double> post(prior);
    double total = 0.0;
    for (std::size_t s = 0; s < n_s; ++s) {
        for (std::size_t f = 0; f < forms.size(); ++f) {
            double p = prior[s * forms.size() + f];
            for (const auto &e : events) {
                const int k = popcount(e.intervention.bits & static_cast<std::uint32_t>(s));
                const double a = clamped(sigmoid(forms[f].bias, forms[f].gain, k), clamp);
                p *= e.activated ? a : 1.0 - a;
            }
            post[s * forms.size() + f] = p;
            total += p;
        }
    }
    for (double &p : post) p /= total;
    return post;
}

inline double entropy_bits(const std::vector<double> &p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0) h -= x * std::log2(x);
    }
    return h;
}

// EIG of one marginal computed by explicitly updating on both outcomes.
// `marginal` selects 0 = structures, 1 = forms, 2 = joint.
inline double brute_eig(const JointBelief &b, Intervention q, int marginal) {
    const std::size_t n_s = b.n_structures();
    const std::size_t n_f = b.n_forms();
    auto project = [&](const std::vector<double> &joint) {
        if (marginal == 2) return joint;
        std::vector<double> m(marginal == 0 ? n_s : n_f, 0.0);
        for (std::size_t s = 0; s < n_s; ++s) {
            for (std::size_t f = 0; f < n_f; ++f) {
                m[marginal == 0 ? s : f] += joint[s * n_f + f];
            }
        }
        return m;
    };
    std::vector<double> prior(b.probs().begin(), b.probs().end());
    double h = entropy_bits(project(prior));
    double expected = 0.0;
    for (int o = 0; o < 2; ++o) {
        std::vector<double> post(prior.size());
        double p_o = 0.0;
        for (std::size_t s = 0; s < n_s; ++s) {
            const int k = popcount(q.bits & static_cast<std::uint32_t>(s));
            for (std::size_t f = 0; f < n_f; ++f) {
                const double a = clamped(sigmoid(b.forms()[f].bias, b.forms()[f].gain, k), b.clamp());
                post[s * n_f + f] = prior[s * n_f + f] * (o ? a : 1.0 - a);
                p_o += post[s * n_f + f];
            }
        }
        if (p_o <= 0) continue;
        for (double &x : post) x /= p_o;
        expected += p_o * entropy_bits(project(post));
    }
    return h - expected;
}

// Random small belief: n_blocks in [1, max_blocks], up to max_forms random
// grid cells, Dirichlet-ish random joint table.
inline JointBelief random_belief(Rng &rng, int max_blocks, std::size_t max_forms) {
    const int n = 1 + static_cast<int>(rng.below(max_blocks));
    const std::size_t n_f = 1 + rng.below(max_forms);
    std::vector<SigmoidForm> forms;
    const auto &cells = form_grid().cells();
    for (std::size_t i = 0; i < n_f; ++i) forms.push_back(cells[rng.below(cells.size())]);
    std::vector<double> probs((std::size_t{1} << n) * n_f);
    for (double &p : probs) {
        // Occasional exact zeros exercise the 0 log 0 paths.
        p = rng.uniform() < 0.1 ? 0.0 : -std::log(1.0 - rng.uniform());
    }
    probs[rng.below(probs.size())] += 1.0;
    return JointBelief(n, std::move(forms), std::move(probs));
}

inline Event random_event(Rng &rng, int n_blocks) {
    return Event{Intervention{static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << n_blocks))},
                 rng.uniform() < 0.5};
}

}  // namespace blicket::testing
