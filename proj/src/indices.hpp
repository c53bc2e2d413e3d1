#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace pursuit::indices {

enum class IndexKind {
    Relu2,          // max{0, x}^2
    Kurtosis,       // x^4
    Abs,            // -|x|
    AbsMax,         // |x|
    Skewness,       // x^3
    ApproxEntropy,  // (m3)^2 + (m4 - 3)^2, dataset level only
};

constexpr bool is_pointwise(IndexKind kind) { return kind != IndexKind::ApproxEntropy; }

// Ascent objective phi paired with the selection score psi.
struct IndexPair {
    IndexKind phi;
    IndexKind psi;
};

// Default pairing: Kurtosis selects by -|x|, everything else by itself.
IndexPair default_pair(IndexKind phi);

std::string name(IndexKind kind);
std::optional<IndexKind> parse(const std::string& tag);

double phi_value(IndexKind kind, double x);
double phi_deriv(IndexKind kind, double x);

// Mean of phi over projections <x_i, u>, or the negentropy approximation
// (m3)^2 + (m4 - 3)^2 for ApproxEntropy. u must be unit norm.
double dataset_score(const Dataset& data, const std::vector<double>& u, IndexKind kind);

// Euclidean (un-projected) gradient of dataset_score with respect to u.
std::vector<double> dataset_score_gradient(const Dataset& data, const std::vector<double>& u,
                                           IndexKind kind);

// Score of precomputed projections; the workhorse of the ascent inner loop.
double projection_score(const double* proj, std::size_t n, IndexKind kind);

}  // namespace pursuit::indices
