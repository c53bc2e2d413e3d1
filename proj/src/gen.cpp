#include "gen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "linalg.hpp"

namespace pursuit::gen {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("p must lie in (0, 1), got " + std::to_string(p));
}

double sample_ambient(AmbientLaw law, Rng& rng) {
    switch (law) {
        case AmbientLaw::Gaussian:
            return rng.normal();
        case AmbientLaw::Rademacher:
            return rng.uniform() < 0.5 ? 1.0 : -1.0;
        case AmbientLaw::HeavyTailedStudentT: {
            // t_2 = Z / sqrt(V / 2) with V ~ chi^2_2 = 2 Exp(1). The fourth
            // moment is unbounded, so no variance standardization applies.
            double u;
            do {
                u = rng.uniform();
            } while (u == 0.0);
            return rng.normal() / std::sqrt(-std::log(u));
        }
        case AmbientLaw::SkewNormal: {
            // |Z1|-conditioning construction for alpha = 3, standardized by
            // the analytic mean and variance.
            constexpr double alpha = 3.0;
            const double delta = alpha / std::sqrt(1.0 + alpha * alpha);
            const double mean = delta * std::sqrt(2.0 / kPi);
            const double sd = std::sqrt(1.0 - 2.0 * delta * delta / kPi);
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            const double x = delta * std::abs(z1) + std::sqrt(1.0 - delta * delta) * z2;
            return (x - mean) / sd;
        }
    }
    throw std::invalid_argument("unknown ambient law");
}

// Orthonormal basis (u*, e_2, ..., e_d) completing the given unit direction.
std::vector<std::vector<double>> complete_basis(const std::vector<double>& u, Rng& rng) {
    const std::size_t d = u.size();
    std::vector<std::vector<double>> basis;
    basis.reserve(d);
    basis.push_back(u);
    while (basis.size() < d) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.normal();
        for (const auto& b : basis) la::axpy(v.data(), b.data(), d, -la::dot(v, b));
        if (la::normalize(v.data(), d) > 1e-8) basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

void PlantedSpec::validate() const {
    if (d < 2) throw std::invalid_argument("d must be >= 2");
    check_p(p);
    if (!u_star.empty()) {
        if (u_star.size() != d) throw std::invalid_argument("u_star dimension mismatch");
        if (std::abs(la::norm(u_star) - 1.0) > 1e-12)
            throw std::invalid_argument("u_star must have unit norm");
    }
}

std::vector<double> sample_unit_sphere(std::size_t d, Rng& rng) {
    if (d == 0) throw std::invalid_argument("dimension must be positive");
    std::vector<double> u(d);
    double n = 0.0;
    do {
        for (auto& x : u) x = rng.normal();
        n = la::norm(u);
    } while (n < 1e-12);
    la::scale(u.data(), d, 1.0 / n);
    return u;
}

double sample_signal(SignalLaw law, double p, Rng& rng) {
    check_p(p);
    switch (law) {
        case SignalLaw::ImbalancedClusters:
            return rng.uniform() < p ? std::sqrt((1.0 - p) / p) : -std::sqrt(p / (1.0 - p));
        case SignalLaw::BernoulliRademacher: {
            const double u = rng.uniform();
            if (u < p / 2.0) return std::sqrt(1.0 / p);
            if (u < p) return -std::sqrt(1.0 / p);
            return 0.0;
        }
        case SignalLaw::GaussianMixtureShift: {
            // 0.9 N(0,1) + 0.1 N(5,1), standardized to mean 0 variance 1.
            const double raw = rng.uniform() < 0.1 ? 5.0 + rng.normal() : rng.normal();
            return (raw - 0.5) / std::sqrt(3.25);
        }
    }
    throw std::invalid_argument("unknown signal law");
}

Dataset sample_planted(const PlantedSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    const std::size_t d = spec.d;

    std::vector<double> u = spec.u_star.empty() ? sample_unit_sphere(d, rng) : spec.u_star;

    Dataset out(n, d);
    if (spec.ambient == AmbientLaw::Gaussian) {
        std::vector<double> g(d);
        for (std::size_t i = 0; i < n; ++i) {
            const double nu = sample_signal(spec.signal, spec.p, rng);
            for (auto& x : g) x = rng.normal();
            const double gu = la::dot(g, u);
            auto row = out.mutable_row(i);
            for (std::size_t j = 0; j < d; ++j) row[j] = nu * u[j] + g[j] - gu * u[j];
        }
    } else {
        const auto basis = complete_basis(u, rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double nu = sample_signal(spec.signal, spec.p, rng);
            auto row = out.mutable_row(i);
            for (std::size_t j = 0; j < d; ++j) row[j] = nu * u[j];
            for (std::size_t k = 1; k < d; ++k)
                la::axpy(row.data(), basis[k].data(), d, sample_ambient(spec.ambient, rng));
        }
    }
    out.set_true_direction(std::move(u));
    return out;
}

Dataset sample_mixture_shift(std::size_t n, std::size_t d, double p, double delta,
                             double lambda, Rng& rng) {
    check_p(p);
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (d < 2) throw std::invalid_argument("d must be >= 2");

    auto u = sample_unit_sphere(d, rng);
    Dataset out(n, d);
    std::vector<int> labels(n);
    const double sd = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) {
        const bool shifted = rng.uniform() < p;
        labels[i] = shifted ? 1 : 0;
        auto row = out.mutable_row(i);
        if (shifted) {
            for (std::size_t j = 0; j < d; ++j) row[j] = delta * u[j] + sd * rng.normal();
        } else {
            for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal();
        }
    }
    out.set_labels(std::move(labels));
    out.set_true_direction(std::move(u));
    return out;
}

Dataset sample_anisotropic(std::size_t n, std::size_t d, double p, double lambda, Rng& rng) {
    check_p(p);
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    if (d < 2) throw std::invalid_argument("d must be >= 2");

    auto u = sample_unit_sphere(d, rng);
    Dataset out(n, d);
    std::vector<int> labels(n);
    const double stretch = std::sqrt(lambda) - 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool perturbed = rng.uniform() < p;
        labels[i] = perturbed ? 1 : 0;
        auto row = out.mutable_row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal();
        if (perturbed) {
            // Scale the u*-component by sqrt(lambda).
            const double c = la::dot(row.data(), u.data(), d);
            la::axpy(row.data(), u.data(), d, c * stretch);
        }
    }
    out.set_labels(std::move(labels));
    out.set_true_direction(std::move(u));
    return out;
}

std::vector<double> column_means(const Dataset& data) {
    const std::size_t n = data.rows(), d = data.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) la::axpy(mean.data(), data.row(i).data(), d, 1.0);
    la::scale(mean.data(), d, 1.0 / static_cast<double>(n));
    return mean;
}

std::vector<double> sample_covariance(const Dataset& data) {
    const std::size_t n = data.rows(), d = data.dim();
    const auto mean = column_means(data);
    std::vector<double> cov(d * d, 0.0);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < d; ++j) centered[j] = row[j] - mean[j];
        for (std::size_t a = 0; a < d; ++a) {
            const double ca = centered[a];
            for (std::size_t b = a; b < d; ++b) cov[a * d + b] += ca * centered[b];
        }
    }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            cov[a * d + b] /= static_cast<double>(n);
            cov[b * d + a] = cov[a * d + b];
        }
    return cov;
}

Dataset LinearTransform::apply(const Dataset& data) const {
    if (data.dim() != dim) throw std::invalid_argument("transform dimension mismatch");
    const std::size_t n = data.rows(), d = dim;
    Dataset out(n, d);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < d; ++j) centered[j] = row[j] - mean[j];
        auto dst = out.mutable_row(i);
        for (std::size_t b = 0; b < d; ++b) {
            double s = 0.0;
            for (std::size_t a = 0; a < d; ++a) s += centered[a] * matrix[a * d + b];
            dst[b] = s;
        }
    }
    if (data.has_labels()) out.set_labels(data.labels());
    if (data.has_true_direction()) {
        std::vector<double> u(d, 0.0);
        for (std::size_t b = 0; b < d; ++b)
            for (std::size_t a = 0; a < d; ++a)
                u[b] += data.true_direction()[a] * matrix[a * d + b];
        if (la::normalize(u.data(), d) > 1e-12) out.set_true_direction(std::move(u));
    }
    return out;
}

LinearTransform whiten_fit(const Dataset& data) {
    const std::size_t n = data.rows(), d = data.dim();
    if (n <= d)
        throw std::invalid_argument("whitening needs n > d rows: have n = " + std::to_string(n) +
                                    ", d = " + std::to_string(d) + " (short by " +
                                    std::to_string(d + 1 - n) + ")");
    const auto cov = sample_covariance(data);
    const auto eig = la::jacobi_eigensym(cov, d);
    const double floor = 1e-10 * std::max(eig.eigenvalues.front(), 0.0);

    // Symmetric (ZCA) inverse square root: V diag(1/sqrt(lambda)) V^T.
    LinearTransform t;
    t.dim = d;
    t.mean = column_means(data);
    t.matrix.assign(d * d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        const double lambda = std::max(eig.eigenvalues[k], floor);
        if (lambda <= 0.0)
            throw std::invalid_argument("whitening: covariance is singular");
        const double inv_sqrt = 1.0 / std::sqrt(lambda);
        const auto& v = eig.eigenvectors[k];
        for (std::size_t a = 0; a < d; ++a) {
            const double va = v[a] * inv_sqrt;
            for (std::size_t b = 0; b < d; ++b) t.matrix[a * d + b] += va * v[b];
        }
    }
    return t;
}

Dataset whiten(const Dataset& data) { return whiten_fit(data).apply(data); }

PcaBasis pca_fit(const Dataset& data, std::size_t k) {
    const std::size_t n = data.rows(), d = data.dim();
    if (k < 1 || k > d)
        throw std::invalid_argument("pca: k must lie in [1, d], got " + std::to_string(k));
    if (n < 2) throw std::invalid_argument("pca needs at least two rows");

    const auto eig = la::jacobi_eigensym(sample_covariance(data), d);
    PcaBasis basis;
    basis.mean = column_means(data);
    basis.k = k;
    basis.d = d;
    basis.rows.resize(k * d);
    for (std::size_t i = 0; i < k; ++i)
        std::copy(eig.eigenvectors[i].begin(), eig.eigenvectors[i].end(),
                  basis.rows.begin() + i * d);
    return basis;
}

Dataset PcaBasis::apply(const Dataset& data) const {
    if (data.dim() != d) throw std::invalid_argument("pca basis dimension mismatch");
    const std::size_t n = data.rows();
    Dataset out(n, k);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < d; ++j) centered[j] = row[j] - mean[j];
        auto dst = out.mutable_row(i);
        for (std::size_t c = 0; c < k; ++c)
            dst[c] = la::dot(centered.data(), rows.data() + c * d, d);
    }
    if (data.has_labels()) out.set_labels(data.labels());
    return out;
}

std::pair<Dataset, PcaBasis> pca_reduce(const Dataset& data, std::size_t k) {
    auto basis = pca_fit(data, k);
    return {basis.apply(data), std::move(basis)};
}

}  // namespace pursuit::gen
