#pragma once

#include <functional>

#include <Eigen/Dense>

#include "hestonvar/quadrature.hpp"

namespace hestonvar {

// Truncated computational domain [x_min,x_max] x [a,y_max] with a uniform
// tensor grid of nx-by-ny cells. Discrete functions carry homogeneous
// Dirichlet values on all four edges.
struct TruncatedDomain {
    double x_min = -6.0;
    double x_max = 6.0;
    double a = 1e-2;    // variance lower cutoff
    double y_max = 1.0; // variance upper cutoff
    int nx = 64;
    int ny = 48;

    void validate() const;

    double hx() const { return (x_max - x_min) / nx; }
    double hy() const { return (y_max - a) / ny; }
    double x(int ix) const { return x_min + ix * hx(); }
    double y(int iy) const { return a + iy * hy(); }

    // Interior nodes are (ix,iy) with 1 <= ix <= nx-1, 1 <= iy <= ny-1,
    // numbered row-major with x fastest.
    int interior_count() const { return (nx - 1) * (ny - 1); }
    int interior_index(int ix, int iy) const { return (iy - 1) * (nx - 1) + (ix - 1); }
};

// Tensor Gauss-Legendre rule applied per cell and per axis. Orders below
// three are rejected: the weight exp(mu*y^2) varies within a cell.
struct QuadratureRule {
    int order = 5;
    GaussRule rule;

    static QuadratureRule make(int q);
};

// Coefficients of a piecewise-bilinear nodal function on the interior
// grid nodes; boundary values are implicitly zero.
struct DiscreteFunction {
    Eigen::VectorXd values;

    // Bilinear evaluation at an arbitrary point of the closed domain.
    double evaluate(const TruncatedDomain& dom, double x, double y) const;
};

// Weight functions phi(x) = exp(nu|x|) and psi(y) = exp(mu y^2 / 2).
double weight_phi(double x, double nu);
double weight_psi(double y, double mu);

// Nodal interpolation of f at the interior grid nodes (boundary clamped
// to zero).
DiscreteFunction project(const std::function<double(double, double)>& f,
                         const TruncatedDomain& dom);

// Quadrature approximation of (integral |v|^2 phi^2 psi^2)^{1/2}.
double weighted_l2_norm(const DiscreteFunction& v, const TruncatedDomain& dom,
                        const QuadratureRule& quad, double nu, double mu);

// Quadrature approximation of
//   (||v||^2 + ||sqrt(y) dv/dx||^2 + ||sqrt(y) dv/dy||^2)^{1/2}
// with broken gradients of the bilinear basis.
double v_norm(const DiscreteFunction& v, const TruncatedDomain& dom,
              const QuadratureRule& quad, double nu, double mu);

} // namespace hestonvar
