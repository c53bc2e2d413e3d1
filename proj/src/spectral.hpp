#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace pursuit::spectral {

enum class SpectralMethod { Cov4Max, Cov4Min, ThreeTensorDecomp };

std::string name(SpectralMethod method);
std::optional<SpectralMethod> parse(const std::string& tag);

struct SymMatrix {
    std::size_t order = 0;
    std::vector<double> entries;  // row major, symmetric
};

// (1/n) sum ||x_i||^2 x_i x_i^T.
SymMatrix cov4_matrix(const Dataset& data);

enum class Extreme { Max, Min };

struct EigenResult {
    double value = 0.0;
    std::vector<double> vector;
    bool converged = true;
    bool degenerate = false;  // top two Rayleigh quotients nearly tied
};

// Power iteration; the minimum end runs on the shifted matrix
// lambda_max_hat * I - M.
EigenResult extreme_eigenvector(const SymMatrix& m, Extreme which);

// Implicit third-moment flattening T[(a,b), c] = (1/n) sum x[a] x[b] x[c].
// Only matrix-vector products with T and T^T are exposed; each costs O(n d).
class SkewFlattenOperator {
  public:
    explicit SkewFlattenOperator(const Dataset& data);

    std::size_t dim() const { return d_; }

    // v in R^d -> T v in R^{d^2}.
    std::vector<double> forward(const std::vector<double>& v) const;
    // w in R^{d^2} -> T^T w in R^d.
    std::vector<double> adjoint(const std::vector<double>& w) const;
    // Gram product T^T T v, used by the singular-vector iteration.
    std::vector<double> gram(const std::vector<double>& v) const;

  private:
    const Dataset& data_;
    std::size_t d_;
};

struct SingularResult {
    double sigma = 0.0;
    std::vector<double> vector;  // unit right-singular vector
    bool converged = true;
};

SingularResult extreme_singular_vector(const SkewFlattenOperator& op, Extreme which);

std::vector<double> recover_spectral(const Dataset& data, SpectralMethod method,
                                     Extreme three_tensor_end = Extreme::Min);

// Rows projected onto the orthogonal complement of u.
Dataset deflate(const Dataset& data, const std::vector<double>& u);

}  // namespace pursuit::spectral
