#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pursuit::la {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

void scale(double* a, std::size_t n, double c) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= c;
}

void axpy(double* y, const double* x, std::size_t n, double c) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

double normalize(double* a, std::size_t n) {
    const double m = norm(a, n);
    if (m > 0.0) scale(a, n, 1.0 / m);
    return m;
}

EigenSym jacobi_eigensym(const std::vector<double>& matrix, std::size_t order) {
    const std::size_t d = order;
    if (matrix.size() != d * d) throw std::invalid_argument("jacobi_eigensym: size mismatch");

    std::vector<double> a = matrix;
    std::vector<double> v(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += a[p * d + q] * a[p * d + q];
        if (off < 1e-26) break;

        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a[p * d + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p * d + p];
                const double aqq = a[q * d + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a[k * d + p];
                    const double akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a[p * d + k];
                    const double aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v[k * d + p];
                    const double vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return a[i * d + i] > a[j * d + j]; });

    EigenSym out;
    out.eigenvalues.resize(d);
    out.eigenvectors.assign(d, std::vector<double>(d));
    for (std::size_t k = 0; k < d; ++k) {
        out.eigenvalues[k] = a[idx[k] * d + idx[k]];
        for (std::size_t i = 0; i < d; ++i) out.eigenvectors[k][i] = v[i * d + idx[k]];
        // Fix the sign so decompositions are reproducible bit for bit.
        double big = 0.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < d; ++i)
            if (std::abs(out.eigenvectors[k][i]) > big) {
                big = std::abs(out.eigenvectors[k][i]);
                arg = i;
            }
        if (out.eigenvectors[k][arg] < 0.0) scale(out.eigenvectors[k].data(), d, -1.0);
    }
    return out;
}

}  // namespace pursuit::la
