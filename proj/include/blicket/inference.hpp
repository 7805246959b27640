#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "blicket/forms.hpp"

namespace blicket {

// Largest task the joint table is enumerated for.
inline constexpr int kMaxBlocks = 12;

// Likelihood values are clamped to [kDefaultClamp, 1 - kDefaultClamp].
inline constexpr double kDefaultClamp = 1e-9;

// A subset of block indices, stored as a bitmask (bit i = block i).
struct BlockSet {
    std::uint32_t bits = 0;

    static BlockSet from_indices(std::span<const int> indices);
    std::vector<int> indices() const;
    bool contains(int block) const { return (bits >> block) & 1u; }
    int size() const;

    friend bool operator==(BlockSet, BlockSet) = default;
    friend auto operator<=>(BlockSet, BlockSet) = default;
};

inline int overlap(BlockSet a, BlockSet b) { return BlockSet{a.bits & b.bits}.size(); }

// The set of blocks placed on the machine.
using Intervention = BlockSet;
// The set of blocks that are blickets.
using CausalStructure = BlockSet;

struct Event {
    Intervention intervention;
    bool activated = false;

    friend bool operator==(const Event &, const Event &) = default;
};

class DegenerateEvidence : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Clamped activation probability per (form, blicket count), shared between
// beliefs built over the same forms.
class ActivationTable {
   public:
    ActivationTable(std::span<const SigmoidForm> forms, int max_count, double clamp);

    double operator()(std::size_t form, int count) const {
        return values_[static_cast<std::size_t>(count) * n_forms_ + form];
    }
    // Activation of every form at a fixed blicket count.
    std::span<const double> at_count(int count) const {
        return {values_.data() + static_cast<std::size_t>(count) * n_forms_, n_forms_};
    }
    int max_count() const { return max_count_; }
    double clamp() const { return clamp_; }

   private:
    std::size_t n_forms_;
    int max_count_;
    double clamp_;
    std::vector<double> values_;
};

// Exact joint distribution over (structure, form). Structures are indexed
// by their bitmask, so enumeration order is lexicographic by bitmask. The
// table is row-major: probs()[structure * n_forms() + form].
class JointBelief {
   public:
    JointBelief(int n_blocks, std::vector<SigmoidForm> forms, std::vector<double> probs,
                double clamp = kDefaultClamp);

    int n_blocks() const { return n_blocks_; }
    std::size_t n_structures() const { return std::size_t{1} << n_blocks_; }
    std::size_t n_forms() const { return forms_->size(); }
    const std::vector<SigmoidForm> &forms() const { return *forms_; }
    std::span<const double> probs() const { return probs_; }
    double prob(std::size_t structure, std::size_t form) const {
        return probs_[structure * n_forms() + form];
    }
    const ActivationTable &activation() const { return *activation_; }
    double clamp() const { return activation_->clamp(); }

   private:
    JointBelief(int n_blocks, std::shared_ptr<const std::vector<SigmoidForm>> forms,
                std::shared_ptr<const ActivationTable> activation, std::vector<double> probs);

    friend JointBelief update(const JointBelief &, const Event &);
    friend JointBelief condition_on(const JointBelief &, std::span<const Event>);

    int n_blocks_;
    std::shared_ptr<const std::vector<SigmoidForm>> forms_;
    std::shared_ptr<const ActivationTable> activation_;
    std::vector<double> probs_;
};

// Uniform over all 2^n structures times the given form prior. Throws
// std::invalid_argument for n outside [1, kMaxBlocks].
JointBelief uniform_structure_belief(int n_blocks, const FormPrior &form_prior,
                                     double clamp = kDefaultClamp);

double likelihood(const Event &event, CausalStructure structure, const SigmoidForm &form,
                  double clamp = kDefaultClamp);

// One Bayesian update. Returns a new belief; throws DegenerateEvidence when
// the normalizer underflows and std::invalid_argument for events that
// reference blocks outside the task.
JointBelief update(const JointBelief &belief, const Event &event);

// Batch recomputation: prior times the product of all likelihoods,
// accumulated in log space and normalized once.
JointBelief condition_on(const JointBelief &prior, std::span<const Event> events);

FormPrior form_marginal(const JointBelief &belief);
std::vector<double> structure_marginal(const JointBelief &belief);
double blicket_probability(const JointBelief &belief, int block);

// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(std::span<const double> dist);

// {n_blocks, clamp, structures: [bitmask...], forms: [[bias, gain]...], probs: [...]}
nlohmann::json to_json(const JointBelief &belief);
JointBelief belief_from_json(const nlohmann::json &j);

}  // namespace blicket
