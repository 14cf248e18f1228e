#pragma once

#include <functional>
#include <vector>

namespace hestonvar {

// Gauss-Legendre rule on the reference interval [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(int n);

// Integrates f over [a, b] with a fixed n-point Gauss rule.
double gauss_integrate(const std::function<double(double)>& f, double a, double b,
                       const GaussRule& rule);

// Adaptive Gauss-Kronrod (G7, K15) integration of f over [a, b].
// Subdivides until the local error estimate is below
// max(abs_tol, rel_tol * |integral|). Throws NumericalError if the
// subdivision limit is reached without convergence.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, double rel_tol = 1e-10,
                          int max_depth = 60);

} // namespace hestonvar
