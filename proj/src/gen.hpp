#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace pursuit::gen {

enum class SignalLaw {
    ImbalancedClusters,    // sqrt((1-p)/p) w.p. p, else -sqrt(p/(1-p))
    BernoulliRademacher,   // +-sqrt(1/p) w.p. p/2 each, else 0
    GaussianMixtureShift,  // 0.9 N(0,1) + 0.1 N(5,1), standardized
};

enum class AmbientLaw {
    Gaussian,
    Rademacher,
    HeavyTailedStudentT,  // Student-t, 2 degrees of freedom
    SkewNormal,           // alpha = 3, standardized to mean 0 variance 1
};

struct PlantedSpec {
    std::size_t d = 0;
    SignalLaw signal = SignalLaw::ImbalancedClusters;
    double p = 0.1;
    AmbientLaw ambient = AmbientLaw::Gaussian;
    // Optional fixed direction; when empty, drawn uniformly at sample time.
    std::vector<double> u_star;

    void validate() const;
};

std::vector<double> sample_unit_sphere(std::size_t d, Rng& rng);

double sample_signal(SignalLaw law, double p, Rng& rng);

Dataset sample_planted(const PlantedSpec& spec, std::size_t n, Rng& rng);

// (1-p) N(0, I) + p N(delta u*, lambda I). Labels hold the mixture component.
Dataset sample_mixture_shift(std::size_t n, std::size_t d, double p, double delta,
                             double lambda, Rng& rng);

// (1-p) N(0, I) + p N(0, I + u* u*^T (lambda - 1)).
Dataset sample_anisotropic(std::size_t n, std::size_t d, double p, double lambda, Rng& rng);

// Affine map x -> (x - mean) * matrix, with matrix d x d (row major, applied
// as a row vector times matrix). Fitted on one dataset, applicable to another.
struct LinearTransform {
    std::vector<double> mean;
    std::vector<double> matrix;
    std::size_t dim = 0;

    Dataset apply(const Dataset& data) const;
};

// ZCA whitening transform: symmetric inverse square root of the sample
// covariance, eigenvalues floored at 1e-10 * lambda_max.
LinearTransform whiten_fit(const Dataset& data);
Dataset whiten(const Dataset& data);

// Top-k principal directions (orthonormal rows of the k x d basis).
struct PcaBasis {
    std::vector<double> mean;
    std::vector<double> rows;  // k x d, row major
    std::size_t k = 0;
    std::size_t d = 0;

    Dataset apply(const Dataset& data) const;
};

PcaBasis pca_fit(const Dataset& data, std::size_t k);
std::pair<Dataset, PcaBasis> pca_reduce(const Dataset& data, std::size_t k);

// Column means and the dense sample covariance (denominator n).
std::vector<double> column_means(const Dataset& data);
std::vector<double> sample_covariance(const Dataset& data);

}  // namespace pursuit::gen
