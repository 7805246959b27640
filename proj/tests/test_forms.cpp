#include "doctest.h"

#include <cmath>
#include <numeric>

#include "blicket/forms.hpp"
#include "blicket/random.hpp"
#include "support.hpp"

using namespace blicket;
using blicket::testing::sigmoid;

namespace {

double gamma_pdf(double x, double shape, double scale) {
    if (x <= 0.0) return shape == 1.0 ? 1.0 / scale : 0.0;
    return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
                    shape * std::log(scale));
}

std::size_t argmax(const std::vector<double> &v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("activation probability follows the sigmoid") {
    CHECK(activation_probability({1.9, 11}, 2) == doctest::Approx(0.7503).epsilon(1e-4));
    CHECK(activation_probability({0.9, 11}, 1) == doctest::Approx(0.7503).epsilon(1e-4));
    for (double g : {0.0, 2.0, 11.0, 100.0}) {
        CHECK(activation_probability({2.0, g}, 2) == doctest::Approx(0.5));
    }
    for (const auto &f : form_grid().cells()) {
        for (int n = 0; n <= 9; ++n) {
            REQUIRE(activation_probability(f, n) == doctest::Approx(sigmoid(f.bias, f.gain, n)));
        }
    }
}

TEST_CASE("activation is monotone in the blicket count for every grid cell") {
    for (const auto &f : form_grid().cells()) {
        for (int n = 0; n < 12; ++n) {
            REQUIRE(activation_probability(f, n + 1) >= activation_probability(f, n));
        }
    }
}

TEST_CASE("canonical forms match the form table") {
    const double bias[] = {0.5, 0.9, 1.5, 1.9, 2.5, 2.9};
    for (std::size_t i = 0; i < kCanonicalNames.size(); ++i) {
        const auto name = kCanonicalNames[i];
        const auto f = canonical_form(name);
        CHECK(f.bias == bias[i]);
        CHECK(f.gain == (is_noisy(name) ? 11.0 : 100.0));
        const int k = blicket_threshold(name);
        const double at = activation_probability(f, k);
        if (is_noisy(name)) {
            CHECK(std::abs(at - 0.75) < 5e-3);
        } else {
            CHECK(at > 0.999);
            CHECK(activation_probability(f, k - 1) < 1e-3);
        }
        CHECK(canonical_form(to_string(name)) == f);
    }
    CHECK(canonical_form("Conjunctive") == SigmoidForm{1.5, 100});
    CHECK(activation_probability(canonical_form("Conjunctive"), 2) >= 0.999);
    CHECK(canonical_form("NoisyThreeConjunctive") == SigmoidForm{2.9, 11});
    CHECK(activation_probability(canonical_form("Disjunctive"), 0) <= 1e-9);
    CHECK_THROWS_AS(canonical_form("Preventative"), std::invalid_argument);
}

TEST_CASE("form grid has 400 cells in bias-major order") {
    const auto &g = form_grid();
    REQUIRE(g.cells().size() == 400);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(g.bias_values()[i] == doctest::Approx(0.15 * i));
        CHECK(g.gain_values()[i] == doctest::Approx(2.0 * i));
        for (std::size_t j = 0; j < 20; ++j) {
            CHECK(g.cells()[FormGrid::cell_index(i, j)] ==
                  SigmoidForm{g.bias_values()[i], g.gain_values()[j]});
        }
    }
    CHECK(g.bias_values().back() == doctest::Approx(2.85));
    CHECK(g.gain_values().back() == doctest::Approx(38.0));
}

TEST_CASE("prior grid rows") {
    const auto &rows = prior_grid();
    REQUIRE(rows.size() == 24);
    CHECK(rows[0].bias == GammaParams{4, 0.1});
    CHECK(rows[0].gain == GammaParams{101, 0.1});
    CHECK(rows[23].bias == GammaParams{4.2, 0.25});
    CHECK(rows[23].gain == GammaParams{21, 1});
    CHECK(&prior_row(1) == &rows[0]);
    CHECK_THROWS_AS(prior_row(0), std::out_of_range);
    CHECK_THROWS_AS(prior_row(25), std::out_of_range);
    const double bias_modes[] = {0.3, 0.3, 0.5, 0.5, 0.8, 0.8};
    const double gain_modes[] = {10, 10, 20, 20};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].bias.mode() == doctest::Approx(bias_modes[i / 4]));
        CHECK(rows[i].gain.mode() == doctest::Approx(gain_modes[i % 4]));
    }
}

TEST_CASE("discretized prior is the normalized product of gamma densities") {
    for (int row = 1; row <= kPriorCount; ++row) {
        const auto &r = prior_row(row);
        const auto prior = discretized_prior(row);
        REQUIRE(prior.size() == 400);
        std::vector<double> expected(400);
        double total = 0.0;
        for (std::size_t c = 0; c < 400; ++c) {
            const auto &f = form_grid().cells()[c];
            expected[c] = gamma_pdf(f.bias, r.bias.shape, r.bias.scale) *
                          gamma_pdf(f.gain, r.gain.shape, r.gain.scale);
            total += expected[c];
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < 400; ++c) {
            REQUIRE(prior.weights[c] >= 0.0);
            REQUIRE(prior.weights[c] == doctest::Approx(expected[c] / total).epsilon(1e-9));
            sum += prior.weights[c];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        // Zero density at gain 0 for every shape > 1.
        for (std::size_t b = 0; b < 20; ++b) {
            CHECK(prior.weights[FormGrid::cell_index(b, 0)] == 0.0);
        }
    }
}

TEST_CASE("discretized prior peaks near the gamma modes") {
    const auto prior = discretized_prior(1);
    const std::size_t peak = argmax(prior.weights);
    CHECK(prior.forms[peak].bias == doctest::Approx(0.3));
    CHECK(prior.forms[peak].gain == doctest::Approx(10.0));
    CHECK_THROWS_AS(discretized_prior(GammaParams{-1, 1}, GammaParams{2, 1}),
                    std::invalid_argument);
}

TEST_CASE("normalized prior is invariant to rescaling") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SigmoidForm> forms;
        std::vector<double> w;
        const std::size_t n = 1 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            forms.push_back(form_grid().cells()[rng.below(400)]);
            w.push_back(rng.uniform() + 1e-3);
        }
        const double scale = std::exp(20.0 * (rng.uniform() - 0.5));
        std::vector<double> scaled(w);
        for (double &x : scaled) x *= scale;
        const auto a = normalized_prior(forms, w);
        const auto b = normalized_prior(forms, scaled);
        CHECK(std::accumulate(a.weights.begin(), a.weights.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(a.weights[i] == doctest::Approx(b.weights[i]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(normalized_prior({{0.5, 100}}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(normalized_prior({{0.5, 100}}, {-1.0}), std::invalid_argument);
    const auto pm = point_mass({0.5, 100});
    CHECK(pm.size() == 1);
    CHECK(pm.weights[0] == 1.0);
}
