#include "indices.hpp"

#include <cmath>
#include <stdexcept>

#include "linalg.hpp"

namespace pursuit::indices {

IndexPair default_pair(IndexKind phi) {
    if (phi == IndexKind::Kurtosis) return {IndexKind::Kurtosis, IndexKind::Abs};
    return {phi, phi};
}

std::string name(IndexKind kind) {
    switch (kind) {
        case IndexKind::Relu2: return "relu2";
        case IndexKind::Kurtosis: return "kurtosis";
        case IndexKind::Abs: return "abs";
        case IndexKind::AbsMax: return "absmax";
        case IndexKind::Skewness: return "skewness";
        case IndexKind::ApproxEntropy: return "approxentropy";
    }
    return "?";
}

std::optional<IndexKind> parse(const std::string& tag) {
    for (auto kind : {IndexKind::Relu2, IndexKind::Kurtosis, IndexKind::Abs, IndexKind::AbsMax,
                      IndexKind::Skewness, IndexKind::ApproxEntropy})
        if (name(kind) == tag) return kind;
    return std::nullopt;
}

double phi_value(IndexKind kind, double x) {
    switch (kind) {
        case IndexKind::Relu2: {
            const double r = x > 0.0 ? x : 0.0;
            return r * r;
        }
        case IndexKind::Kurtosis: return x * x * x * x;
        case IndexKind::Abs: return -std::abs(x);
        case IndexKind::AbsMax: return std::abs(x);
        case IndexKind::Skewness: return x * x * x;
        case IndexKind::ApproxEntropy: break;
    }
    throw std::invalid_argument("phi_value: " + name(kind) + " has no pointwise form");
}

double phi_deriv(IndexKind kind, double x) {
    // Subgradient at the kinks of |x| and max{0,x} is fixed to 0.
    switch (kind) {
        case IndexKind::Relu2: return x > 0.0 ? 2.0 * x : 0.0;
        case IndexKind::Kurtosis: return 4.0 * x * x * x;
        case IndexKind::Abs: return x > 0.0 ? -1.0 : (x < 0.0 ? 1.0 : 0.0);
        case IndexKind::AbsMax: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
        case IndexKind::Skewness: return 3.0 * x * x;
        case IndexKind::ApproxEntropy: break;
    }
    throw std::invalid_argument("phi_deriv: " + name(kind) + " has no pointwise form");
}

double projection_score(const double* proj, std::size_t n, IndexKind kind) {
    if (n == 0) throw std::invalid_argument("score of empty dataset");
    if (kind == IndexKind::ApproxEntropy) {
        double m3 = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = proj[i];
            const double t3 = t * t * t;
            m3 += t3;
            m4 += t3 * t;
        }
        m3 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        return m3 * m3 + (m4 - 3.0) * (m4 - 3.0);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += phi_value(kind, proj[i]);
    return s / static_cast<double>(n);
}

namespace {

std::vector<double> project(const Dataset& data, const std::vector<double>& u) {
    if (u.size() != data.dim()) throw std::invalid_argument("direction dimension mismatch");
    std::vector<double> proj(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i)
        proj[i] = la::dot(data.row(i).data(), u.data(), u.size());
    return proj;
}

}  // namespace

double dataset_score(const Dataset& data, const std::vector<double>& u, IndexKind kind) {
    const auto proj = project(data, u);
    return projection_score(proj.data(), proj.size(), kind);
}

std::vector<double> dataset_score_gradient(const Dataset& data, const std::vector<double>& u,
                                           IndexKind kind) {
    const std::size_t n = data.rows(), d = data.dim();
    if (n == 0) throw std::invalid_argument("gradient of empty dataset");
    const auto proj = project(data, u);

    std::vector<double> grad(d, 0.0);
    if (kind == IndexKind::ApproxEntropy) {
        // Chain rule on the projected moments:
        //   grad = 2 m3 grad(m3) + 2 (m4 - 3) grad(m4),
        //   grad(m_k) = (k/n) sum <x_i,u>^{k-1} x_i.
        double m3 = 0.0, m4 = 0.0;
        for (double t : proj) {
            m3 += t * t * t;
            m4 += t * t * t * t;
        }
        m3 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = proj[i];
            const double w = 2.0 * m3 * 3.0 * t * t + 2.0 * (m4 - 3.0) * 4.0 * t * t * t;
            la::axpy(grad.data(), data.row(i).data(), d, w / static_cast<double>(n));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            la::axpy(grad.data(), data.row(i).data(), d,
                     phi_deriv(kind, proj[i]) / static_cast<double>(n));
    }
    return grad;
}

}  // namespace pursuit::indices
