#pragma once

#include <vector>

namespace csk {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta,
/// via the Golub-Welsch eigenvalue problem.
QuadRule gauss_jacobi(int n, double alpha, double beta);
QuadRule gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
QuadRule gauss_legendre(int n, double a, double b);

/// Fixed-level tanh-sinh rule on [0, 1]. Both x and 1 - x are stored so
/// that nodes crowding either endpoint keep their distance to it exactly.
struct TanhSinhRule {
    std::vector<double> x;
    std::vector<double> xc;  // 1 - x
    std::vector<double> w;
};
TanhSinhRule tanh_sinh(double step, double cutoff = 1e-300);

}  // namespace csk
