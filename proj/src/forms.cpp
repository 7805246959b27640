#include "blicket/forms.hpp"

#include <boost/math/distributions/gamma.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blicket {

double activation_probability(const SigmoidForm &form, int n_blickets) {
    return 1.0 / (1.0 + std::exp(-form.gain * (static_cast<double>(n_blickets) - form.bias)));
}

FormGrid::FormGrid() {
    for (std::size_t i = 0; i < kGridSide; ++i) {
        bias_[i] = kBiasStep * static_cast<double>(i);
        gain_[i] = kGainStep * static_cast<double>(i);
    }
    cells_.reserve(kGridCells);
    for (double b : bias_) {
        for (double g : gain_) {
            cells_.push_back({b, g});
        }
    }
}

const FormGrid &form_grid() {
    static const FormGrid grid;
    return grid;
}

const std::array<PriorRow, kPriorCount> &prior_grid() {
    static const std::array<PriorRow, kPriorCount> rows = [] {
        const std::array<GammaParams, 6> bias = {{
            {4.0, 0.1}, {2.2, 0.25}, {6.0, 0.1}, {3.0, 0.25}, {9.0, 0.1}, {4.2, 0.25},
        }};
        const std::array<GammaParams, 4> gain = {{
            {101.0, 0.1}, {11.0, 1.0}, {201.0, 0.1}, {21.0, 1.0},
        }};
        std::array<PriorRow, kPriorCount> out{};
        std::size_t r = 0;
        for (const auto &b : bias) {
            for (const auto &g : gain) {
                out[r++] = {b, g};
            }
        }
        return out;
    }();
    return rows;
}

const PriorRow &prior_row(int prior_index) {
    if (prior_index < 1 || prior_index > kPriorCount) {
        throw std::out_of_range("prior index must be in 1.." + std::to_string(kPriorCount) +
                                ", got " + std::to_string(prior_index));
    }
    return prior_grid()[static_cast<std::size_t>(prior_index - 1)];
}

namespace {

void check_gamma(const GammaParams &p) {
    if (!(p.shape > 0.0) || !(p.scale > 0.0) || !std::isfinite(p.shape) ||
        !std::isfinite(p.scale)) {
        throw std::invalid_argument("gamma shape and scale must be positive and finite");
    }
}

}  // namespace

FormPrior normalized_prior(std::vector<SigmoidForm> forms, std::vector<double> weights) {
    if (forms.size() != weights.size() || forms.empty()) {
        throw std::invalid_argument("form prior needs one weight per form");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("form prior weights must be finite and nonnegative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("form prior has no mass");
    }
    for (double &w : weights) {
        w /= total;
    }
    return {std::move(forms), std::move(weights)};
}

FormPrior discretized_prior(const GammaParams &bias_prior, const GammaParams &gain_prior,
                            const FormGrid &grid) {
    check_gamma(bias_prior);
    check_gamma(gain_prior);
    const boost::math::gamma_distribution<double> bias_dist(bias_prior.shape, bias_prior.scale);
    const boost::math::gamma_distribution<double> gain_dist(gain_prior.shape, gain_prior.scale);

    std::array<double, kGridSide> bias_density{};
    std::array<double, kGridSide> gain_density{};
    for (std::size_t i = 0; i < kGridSide; ++i) {
        bias_density[i] = boost::math::pdf(bias_dist, grid.bias_values()[i]);
        gain_density[i] = boost::math::pdf(gain_dist, grid.gain_values()[i]);
    }

    std::vector<double> weights(kGridCells);
    for (std::size_t i = 0; i < kGridSide; ++i) {
        for (std::size_t j = 0; j < kGridSide; ++j) {
            weights[FormGrid::cell_index(i, j)] = bias_density[i] * gain_density[j];
        }
    }
    return normalized_prior(grid.cells(), std::move(weights));
}

FormPrior discretized_prior(int prior_index) {
    const PriorRow &row = prior_row(prior_index);
    return discretized_prior(row.bias, row.gain);
}

FormPrior point_mass(const SigmoidForm &form) { return {{form}, {1.0}}; }

SigmoidForm canonical_form(CanonicalName name) {
    switch (name) {
        case CanonicalName::Disjunctive:
            return {0.5, kDeterministicGain};
        case CanonicalName::NoisyDisjunctive:
            return {0.9, kNoisyGain};
        case CanonicalName::Conjunctive:
            return {1.5, kDeterministicGain};
        case CanonicalName::NoisyConjunctive:
            return {1.9, kNoisyGain};
        case CanonicalName::ThreeConjunctive:
            return {2.5, kDeterministicGain};
        case CanonicalName::NoisyThreeConjunctive:
            return {2.9, kNoisyGain};
    }
    throw std::invalid_argument("unknown canonical form");
}

std::string_view to_string(CanonicalName name) {
    switch (name) {
        case CanonicalName::Disjunctive:
            return "Disjunctive";
        case CanonicalName::NoisyDisjunctive:
            return "NoisyDisjunctive";
        case CanonicalName::Conjunctive:
            return "Conjunctive";
        case CanonicalName::NoisyConjunctive:
            return "NoisyConjunctive";
        case CanonicalName::ThreeConjunctive:
            return "ThreeConjunctive";
        case CanonicalName::NoisyThreeConjunctive:
            return "NoisyThreeConjunctive";
    }
    return "?";
}

CanonicalName parse_canonical_name(std::string_view name) {
    for (CanonicalName c : kCanonicalNames) {
        if (to_string(c) == name) {
            return c;
        }
    }
    throw std::invalid_argument("unknown functional form name: " + std::string(name));
}

SigmoidForm canonical_form(std::string_view name) {
    return canonical_form(parse_canonical_name(name));
}

int blicket_threshold(CanonicalName name) {
    switch (name) {
        case CanonicalName::Disjunctive:
        case CanonicalName::NoisyDisjunctive:
            return 1;
        case CanonicalName::Conjunctive:
        case CanonicalName::NoisyConjunctive:
            return 2;
        case CanonicalName::ThreeConjunctive:
        case CanonicalName::NoisyThreeConjunctive:
            return 3;
    }
    return 0;
}

bool is_noisy(CanonicalName name) {
    return name == CanonicalName::NoisyDisjunctive || name == CanonicalName::NoisyConjunctive ||
           name == CanonicalName::NoisyThreeConjunctive;
}

}  // namespace blicket
