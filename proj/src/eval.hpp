#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "gen.hpp"
#include "indices.hpp"
#include "pursuit.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace pursuit::eval {

// |<u, v>| for unit directions; sign is unidentifiable for even indices.
double alignment(const std::vector<double>& u, const std::vector<double>& v);

// A recovery method: either gradient ascent with a projection index or a
// spectral baseline. Tags: relu2, kurtosis, abs, absmax, skewness,
// approxentropy, cov4max, cov4min, 3tensor.
struct Method {
    bool gradient = true;
    indices::IndexKind phi = indices::IndexKind::Relu2;
    spectral::SpectralMethod spectral_method = spectral::SpectralMethod::Cov4Max;
    spectral::Extreme three_tensor_end = spectral::Extreme::Min;

    std::string name() const;
    static std::optional<Method> parse(const std::string& tag);
};

// Runs one method on one dataset; for gradient methods the recipe is derived
// from (d, p) and sized against the dataset, with at least n_init_min
// initializations when the data allows.
std::vector<double> run_method(const Dataset& data, const Method& method, double p,
                               std::uint64_t seed, std::size_t n_init_min = 32);

// ---------------------------------------------------------------------------
// Information gain of a thresholded projection, entropies in bits.

struct IgSplit {
    double threshold = 0.0;
    double train_ig = 0.0;
    double test_ig = 0.0;
    bool single_class = false;
};

IgSplit information_gain(const std::vector<double>& train_proj,
                         const std::vector<int>& train_labels,
                         const std::vector<double>& test_proj,
                         const std::vector<int>& test_labels);

// ---------------------------------------------------------------------------
// Hypothesis test: H1 iff the ReLU2 score along u_hat reaches the threshold.

struct TestOutcome {
    bool planted = false;  // true = H1
    double statistic = 0.0;
    double threshold = 0.0;
};

TestOutcome planted_hypothesis_test(const Dataset& data, const std::vector<double>& u_hat,
                                    double threshold);

// ReLU2 recovery tuned for the calibrated test: every step resamples the full
// dataset with replacement. Held-out selection on small fresh slices is too
// noisy at test-sized datasets and drags the H1 statistic toward H0.
std::vector<double> recover_test_direction(const Dataset& data, double p, std::uint64_t seed);

class CalibrationError : public std::runtime_error {
  public:
    CalibrationError(const std::string& what, double h0_mean, double h1_mean)
        : std::runtime_error(what), h0_mean(h0_mean), h1_mean(h1_mean) {}
    double h0_mean, h1_mean;
};

// Midpoint between mean H0 statistic (fresh Gaussian data, random direction)
// and mean H1 statistic (planted data, direction from two_step), each over
// `trials` runs. Throws CalibrationError when the means overlap.
double calibrate_threshold(std::size_t d, std::size_t n, double p, int trials, Rng& rng);

// ---------------------------------------------------------------------------
// Phase-transition grid.

enum class PRule { PowerLaw, Constant };

struct PhaseGridSpec {
    std::vector<std::size_t> d_values;
    std::vector<std::size_t> n_values;  // total sample budgets
    PRule p_rule = PRule::PowerLaw;
    double p_param = -0.5;  // exponent, or the constant value
    int trials = 10;
    Method method;
    gen::SignalLaw signal = gen::SignalLaw::ImbalancedClusters;
    std::uint64_t seed = 0;
    int jobs = 1;

    double p_for(std::size_t d) const;
    void validate() const;
};

struct PhaseCell {
    std::size_t d = 0, n = 0;
    double p = 0.0;
    double mean = 0.0;  // NaN when every trial failed
    double stddev = 0.0;
    int trials = 0;
};

struct PhaseGridResult {
    PhaseGridSpec spec;
    // cells[ni * d_values.size() + di], ni indexing n_values.
    std::vector<PhaseCell> cells;

    const PhaseCell& cell(std::size_t ni, std::size_t di) const {
        return cells[ni * spec.d_values.size() + di];
    }
};

PhaseGridResult run_phase_grid(const PhaseGridSpec& spec);

// Alignment of one grid cell's single trial, reproducible from the same
// child-seed chain the full grid uses.
double phase_cell_trial(const PhaseGridSpec& spec, std::size_t ni, std::size_t di, int trial);

// ---------------------------------------------------------------------------
// Method comparison with paired datasets.

struct ComparisonSpec {
    std::size_t d = 100;
    double p = 0.1;
    gen::SignalLaw signal = gen::SignalLaw::ImbalancedClusters;
    std::vector<std::size_t> n_values;
    std::vector<Method> methods;
    int trials = 30;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::size_t n_init_min = 32;
};

struct ComparisonRow {
    std::string method;
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0;
    int trials = 0;
};

std::vector<ComparisonRow> run_method_comparison(const ComparisonSpec& spec);

// ---------------------------------------------------------------------------
// Monte-Carlo oracle for the expected signal component of the Riemannian
// gradient, evaluated through the projected-gradient identity in 1-D.

struct McGradient {
    double mean = 0.0;
    double std_error = 0.0;
};

McGradient mc_expected_gradient(gen::SignalLaw signal, double a, double p,
                                indices::IndexKind phi, std::size_t draws, Rng& rng);

// ---------------------------------------------------------------------------
// Information-gain protocol on labeled data.

struct IgProtocolSpec {
    Method method;
    std::size_t pca_k = 100;  // applied when the ambient dimension exceeds it
    bool whiten = false;
    std::size_t n_init = 500;
    std::size_t directions = 30;
    std::uint64_t seed = 0;
};

struct IgProjection {
    double threshold = 0.0;
    double train_ig = 0.0;
    double holdout_ig = 0.0;
};

struct IgReport {
    std::vector<IgProjection> projections;  // sorted by holdout IG descending
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double max_bits = 0.0;  // log2(number of classes)
    bool single_class = false;
};

IgReport run_ig_protocol(const Dataset& train, const Dataset& holdout,
                         const IgProtocolSpec& spec);

}  // namespace pursuit::eval
