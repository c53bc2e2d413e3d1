#pragma once

#include <cstddef>
#include <vector>

namespace pursuit::la {

double dot(const double* a, const double* b, std::size_t n);
double norm(const double* a, std::size_t n);
void scale(double* a, std::size_t n, double c);
// y += c * x
void axpy(double* y, const double* x, std::size_t n, double c);
// Normalizes in place, returns the original norm.
double normalize(double* a, std::size_t n);

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return dot(a.data(), b.data(), a.size());
}
inline double norm(const std::vector<double>& a) { return norm(a.data(), a.size()); }

// Eigendecomposition of a dense symmetric matrix by cyclic Jacobi sweeps.
// Eigenvalues are sorted descending; eigenvectors[k] is the unit eigenvector
// for eigenvalues[k]. Intended for the moderate orders used here (d <= 1024).
struct EigenSym {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;
};

EigenSym jacobi_eigensym(const std::vector<double>& matrix, std::size_t order);

}  // namespace pursuit::la
