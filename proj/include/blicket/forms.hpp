#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blicket {

// A member of the sigmoid family: maps the number of blickets on the machine
// to an activation probability. Bias is the threshold location in
// blicket-count units; gain is the steepness.
struct SigmoidForm {
    double bias = 0.0;
    double gain = 0.0;

    friend bool operator==(const SigmoidForm &, const SigmoidForm &) = default;
};

double activation_probability(const SigmoidForm &form, int n_blickets);

inline constexpr std::size_t kGridSide = 20;
inline constexpr std::size_t kGridCells = kGridSide * kGridSide;
inline constexpr double kBiasStep = 0.15;
inline constexpr double kGainStep = 2.0;

// Gain used for the deterministic canonical forms.
inline constexpr double kDeterministicGain = 100.0;
inline constexpr double kNoisyGain = 11.0;

// The 20x20 bias/gain grid. Cells are ordered bias-major: cell index
// = bias_index * 20 + gain_index.
class FormGrid {
   public:
    FormGrid();

    const std::array<double, kGridSide> &bias_values() const { return bias_; }
    const std::array<double, kGridSide> &gain_values() const { return gain_; }
    const std::vector<SigmoidForm> &cells() const { return cells_; }

    static std::size_t cell_index(std::size_t bias_index, std::size_t gain_index) {
        return bias_index * kGridSide + gain_index;
    }

   private:
    std::array<double, kGridSide> bias_{};
    std::array<double, kGridSide> gain_{};
    std::vector<SigmoidForm> cells_;
};

const FormGrid &form_grid();

struct GammaParams {
    double shape = 1.0;
    double scale = 1.0;

    double mode() const { return (shape - 1.0) * scale; }
    friend bool operator==(const GammaParams &, const GammaParams &) = default;
};

struct PriorRow {
    GammaParams bias;
    GammaParams gain;
};

inline constexpr int kPriorCount = 24;

// The 24 (bias, gain) gamma prior pairs, in table order (row 1 first).
const std::array<PriorRow, kPriorCount> &prior_grid();

// Looks up a 1-based row of the prior grid. Throws std::out_of_range.
const PriorRow &prior_row(int prior_index);

// A probability distribution over a finite set of forms. `forms` and
// `weights` are parallel arrays.
struct FormPrior {
    std::vector<SigmoidForm> forms;
    std::vector<double> weights;

    std::size_t size() const { return forms.size(); }
};

// weight(cell) is proportional to the product of the two gamma densities
// evaluated at the cell's bias and gain. Throws std::invalid_argument on
// invalid gamma parameters or when every cell has zero density.
FormPrior discretized_prior(const GammaParams &bias_prior, const GammaParams &gain_prior,
                            const FormGrid &grid = form_grid());

FormPrior discretized_prior(int prior_index);

// Normalizes nonnegative weights over the given forms. Throws
// std::invalid_argument if the total mass is not positive.
FormPrior normalized_prior(std::vector<SigmoidForm> forms, std::vector<double> weights);

FormPrior point_mass(const SigmoidForm &form);

enum class CanonicalName {
    Disjunctive,
    NoisyDisjunctive,
    Conjunctive,
    NoisyConjunctive,
    ThreeConjunctive,
    NoisyThreeConjunctive,
};

inline constexpr std::array<CanonicalName, 6> kCanonicalNames = {
    CanonicalName::Disjunctive,      CanonicalName::NoisyDisjunctive,
    CanonicalName::Conjunctive,      CanonicalName::NoisyConjunctive,
    CanonicalName::ThreeConjunctive, CanonicalName::NoisyThreeConjunctive,
};

struct CanonicalForm {
    CanonicalName name;
    SigmoidForm params;
};

SigmoidForm canonical_form(CanonicalName name);

// Accepts the names used in task-config files ("Disjunctive",
// "NoisyConjunctive", ...). Throws std::invalid_argument on unknown names.
SigmoidForm canonical_form(std::string_view name);
CanonicalName parse_canonical_name(std::string_view name);
std::string_view to_string(CanonicalName name);

// Minimum number of blickets at which the form is designed to fire.
int blicket_threshold(CanonicalName name);
bool is_noisy(CanonicalName name);

}  // namespace blicket
