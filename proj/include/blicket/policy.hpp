#pragma once

#include <span>
#include <vector>

#include "blicket/inference.hpp"
#include "blicket/random.hpp"

namespace blicket {

enum class EigTarget { Structures, Forms };

// w weights form information against structure information; t is the
// softmax temperature.
struct PolicyParams {
    double w = 0.5;
    double t = 1.0;
};

void validate(const PolicyParams &params);

// Every intervention on an n-block task, in bitmask order. Candidate i is
// the intervention whose bitmask equals i; index 0 is the empty set.
std::vector<Intervention> candidate_set(int n_blocks);
inline std::size_t candidate_count(int n_blocks) { return std::size_t{1} << n_blocks; }

// P(o = 1 | q) under the belief, using clamped activation values.
double outcome_predictive(const JointBelief &belief, Intervention q);

// Expected reduction (bits) in the entropy of the target marginal.
double eig(const JointBelief &belief, Intervention q, EigTarget target);

// w * EIG(forms) + (1 - w) * EIG(structures).
double combined_eig(const JointBelief &belief, Intervention q, double w);

// Both marginal EIGs for every candidate, indexed like candidate_set.
struct EigTable {
    std::vector<double> structures;
    std::vector<double> forms;

    std::vector<double> combined(double w) const;
};

EigTable eig_table(const JointBelief &belief);

// exp(score_i / t) / sum_j exp(score_j / t), with max-subtraction.
// Throws std::invalid_argument for t <= 0 or non-finite scores.
std::vector<double> softmax_policy(std::span<const double> scores, double t);

std::vector<double> random_policy(int n_blocks);

// Inverse-CDF draw from a normalized distribution over candidates.
Intervention sample_intervention(std::span<const double> dist, Rng &rng);
Intervention sample_intervention(std::span<const double> dist, std::uint64_t seed);

}  // namespace blicket
