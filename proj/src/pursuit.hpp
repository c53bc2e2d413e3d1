#pragma once

#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "indices.hpp"
#include "rng.hpp"

namespace pursuit {

enum class BatchStrategy {
    FreshSlices,              // consume disjoint row slices, one per step
    ResampleWithReplacement,  // bootstrap a batch from the full dataset per step
};

struct PursuitConfig {
    std::size_t batch_size = 0;  // rows per gradient step
    std::size_t n_init = 1;
    std::size_t steps = 1;  // per phase
    double eta1 = 1.0;
    double eta2 = 0.5;
    indices::IndexPair pair{indices::IndexKind::Relu2, indices::IndexKind::Relu2};
    BatchStrategy strategy = BatchStrategy::FreshSlices;
    std::uint64_t seed = 0;

    void validate() const;

    // Row budget under FreshSlices: inits, two phases of fresh batches, and
    // one held-out evaluation slice.
    std::size_t required_rows() const {
        return n_init + 2 * batch_size * steps + batch_size;
    }
};

// Parameter recipe: s = ceil(2 log2 d), eta1 = sqrt(d) p (or d p^2 for
// kurtosis), eta2 = 0.5, n_init = ceil(1/p).
PursuitConfig default_recipe(std::size_t d, double p, indices::IndexKind phi,
                             std::uint64_t seed);

// Sizes the config against a dataset of total_rows rows: fresh slices when
// the budget allows, otherwise resampling with replacement on the full set.
void fit_budget(PursuitConfig& cfg, std::size_t total_rows);

struct RunResult {
    std::vector<double> u_hat;
    std::vector<std::vector<double>> per_init_best;
    std::vector<double> per_init_score;
    // score_trace[step][init]: psi score of the visited state on the
    // evaluation batch; phase 1 rows then phase 2 rows.
    std::vector<std::vector<double>> score_trace;
    double alignment = -1.0;  // |<u_hat, u*>| when ground truth known
    std::vector<bool> degenerate;
};

// First n_init rows, normalized. Zero-norm rows are skipped in favor of the
// next row.
std::vector<std::vector<double>> sample_inits(const Dataset& data, std::size_t n_init);

// (I - u u^T) * dataset_score_gradient(batch, u, phi).
std::vector<double> riemannian_gradient(const Dataset& batch, const std::vector<double>& u,
                                        indices::IndexKind phi);

// (u + eta g) / ||u + eta g||. A vanishing norm keeps u and sets *degenerate.
std::vector<double> ascent_step(const std::vector<double>& u, const std::vector<double>& g,
                                double eta, bool* degenerate = nullptr);

struct AscentOutcome {
    std::vector<std::vector<double>> best_dirs;
    std::vector<double> best_scores;  // psi scores on the evaluation batch
    std::vector<std::vector<double>> trace;
    std::vector<bool> degenerate;
};

// One phase of Algorithm-style minibatch Riemannian ascent. All inits share
// each batch; per init the best of the s+1 visited states under the psi score
// on eval_batch is returned.
AscentOutcome gradient_ascent(const Dataset& train, const Dataset& eval_batch,
                              const std::vector<std::vector<double>>& inits,
                              const PursuitConfig& cfg, double eta, Rng& rng);

RunResult two_step(const Dataset& data, const PursuitConfig& cfg);

}  // namespace pursuit
