#include "spectral.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "linalg.hpp"
#include "rng.hpp"

namespace pursuit::spectral {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kRayleighTol = 1e-10;

// Power iteration on a symmetric operator given as a matvec. Returns the
// dominant Rayleigh quotient and its unit vector.
struct PowerResult {
    double value;
    std::vector<double> vector;
    bool converged;
    double runner_up;  // second-largest Rayleigh quotient estimate, crude
};

PowerResult power_iterate(std::size_t d,
                          const std::function<std::vector<double>(const std::vector<double>&)>& matvec) {
    Rng rng(0x9e3779b97f4a7c15ULL);  // fixed seed: iteration is deterministic
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    la::normalize(v.data(), d);

    double rayleigh = 0.0;
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
        auto w = matvec(v);
        const double next = la::dot(v, w);
        if (la::normalize(w.data(), d) < 1e-300) {
            // Operator annihilates the iterate; any unit vector is extremal.
            converged = true;
            rayleigh = 0.0;
            break;
        }
        v = std::move(w);
        if (it > 0 && std::abs(next - rayleigh) < kRayleighTol * (1.0 + std::abs(next))) {
            rayleigh = next;
            converged = true;
            break;
        }
        rayleigh = next;
    }
    return {rayleigh, std::move(v), converged, 0.0};
}

}  // namespace

std::string name(SpectralMethod method) {
    switch (method) {
        case SpectralMethod::Cov4Max: return "cov4max";
        case SpectralMethod::Cov4Min: return "cov4min";
        case SpectralMethod::ThreeTensorDecomp: return "3tensor";
    }
    return "?";
}

std::optional<SpectralMethod> parse(const std::string& tag) {
    for (auto m : {SpectralMethod::Cov4Max, SpectralMethod::Cov4Min,
                   SpectralMethod::ThreeTensorDecomp})
        if (name(m) == tag) return m;
    return std::nullopt;
}

SymMatrix cov4_matrix(const Dataset& data) {
    const std::size_t n = data.rows(), d = data.dim();
    if (n == 0) throw std::invalid_argument("cov4_matrix: empty dataset");
    SymMatrix m{d, std::vector<double>(d * d, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.row(i);
        const double w = la::dot(x.data(), x.data(), d) / static_cast<double>(n);
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = w * x[a];
            for (std::size_t b = a; b < d; ++b) m.entries[a * d + b] += xa * x[b];
        }
    }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) m.entries[b * d + a] = m.entries[a * d + b];
    return m;
}

EigenResult extreme_eigenvector(const SymMatrix& m, Extreme which) {
    const std::size_t d = m.order;
    auto matvec = [&](const std::vector<double>& v) {
        std::vector<double> w(d, 0.0);
        for (std::size_t a = 0; a < d; ++a)
            w[a] = la::dot(m.entries.data() + a * d, v.data(), d);
        return w;
    };

    // Plain iteration finds the eigenvalue of largest magnitude; shifting by
    // it makes the operator PSD so the algebraic extreme dominates instead.
    const double sigma = std::abs(power_iterate(d, matvec).value);
    const double sign = which == Extreme::Max ? 1.0 : -1.0;
    auto shifted = [&](const std::vector<double>& v) {
        auto w = matvec(v);
        for (std::size_t a = 0; a < d; ++a) w[a] = sign * w[a] + sigma * v[a];
        return w;
    };

    auto top = power_iterate(d, shifted);
    EigenResult out;
    out.value = sign * (top.value - sigma);
    out.vector = std::move(top.vector);
    out.converged = top.converged;

    // Degenerate-spectrum flag: a second iterate orthogonal to the result
    // reaching nearly the same Rayleigh quotient.
    auto deflected = [&](const std::vector<double>& v) {
        std::vector<double> p = v;
        la::axpy(p.data(), out.vector.data(), d, -la::dot(p, out.vector));
        auto w = shifted(p);
        la::axpy(w.data(), out.vector.data(), d, -la::dot(w, out.vector));
        return w;
    };
    if (d > 1) {
        auto second = power_iterate(d, deflected);
        if (std::abs(top.value - second.value) < 1e-8 * (1.0 + std::abs(top.value)))
            out.degenerate = true;
    }
    return out;
}

SkewFlattenOperator::SkewFlattenOperator(const Dataset& data) : data_(data), d_(data.dim()) {
    if (data.rows() == 0) throw std::invalid_argument("skew_flatten_operator: empty dataset");
}

std::vector<double> SkewFlattenOperator::forward(const std::vector<double>& v) const {
    const std::size_t n = data_.rows(), d = d_;
    std::vector<double> out(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data_.row(i);
        const double c = la::dot(x.data(), v.data(), d) / static_cast<double>(n);
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = c * x[a];
            for (std::size_t b = 0; b < d; ++b) out[a * d + b] += xa * x[b];
        }
    }
    return out;
}

std::vector<double> SkewFlattenOperator::adjoint(const std::vector<double>& w) const {
    const std::size_t n = data_.rows(), d = d_;
    std::vector<double> out(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data_.row(i);
        double q = 0.0;  // x^T W x with W the (a,b)-unflattening of w
        for (std::size_t a = 0; a < d; ++a)
            q += x[a] * la::dot(w.data() + a * d, x.data(), d);
        la::axpy(out.data(), x.data(), d, q / static_cast<double>(n));
    }
    return out;
}

std::vector<double> SkewFlattenOperator::gram(const std::vector<double>& v) const {
    return adjoint(forward(v));
}

SingularResult extreme_singular_vector(const SkewFlattenOperator& op, Extreme which) {
    const std::size_t d = op.dim();
    auto gram = [&](const std::vector<double>& v) { return op.gram(v); };

    auto top = power_iterate(d, gram);
    SingularResult out;
    if (which == Extreme::Max) {
        out.sigma = std::sqrt(std::max(top.value, 0.0));
        out.vector = std::move(top.vector);
        out.converged = top.converged;
    } else {
        const double shift = top.value;
        auto shifted = [&](const std::vector<double>& v) {
            auto w = gram(v);
            for (std::size_t a = 0; a < d; ++a) w[a] = shift * v[a] - w[a];
            return w;
        };
        auto bottom = power_iterate(d, shifted);
        out.sigma = std::sqrt(std::max(shift - bottom.value, 0.0));
        out.vector = std::move(bottom.vector);
        out.converged = top.converged && bottom.converged;
    }
    return out;
}

std::vector<double> recover_spectral(const Dataset& data, SpectralMethod method,
                                     Extreme three_tensor_end) {
    switch (method) {
        case SpectralMethod::Cov4Max:
            return extreme_eigenvector(cov4_matrix(data), Extreme::Max).vector;
        case SpectralMethod::Cov4Min:
            return extreme_eigenvector(cov4_matrix(data), Extreme::Min).vector;
        case SpectralMethod::ThreeTensorDecomp:
            return extreme_singular_vector(SkewFlattenOperator(data), three_tensor_end).vector;
    }
    throw std::invalid_argument("unknown spectral method");
}

Dataset deflate(const Dataset& data, const std::vector<double>& u) {
    const std::size_t n = data.rows(), d = data.dim();
    if (u.size() != d) throw std::invalid_argument("deflate: dimension mismatch");
    Dataset out = data.slice(0, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = out.mutable_row(i);
        la::axpy(row.data(), u.data(), d, -la::dot(row.data(), u.data(), d));
    }
    if (data.has_labels()) out.set_labels(data.labels());
    return out;
}

}  // namespace pursuit::spectral
