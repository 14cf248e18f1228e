#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hestonvar/form.hpp"

namespace hestonvar {

struct TimeGrid {
    double T = 1.0;
    int nt = 128;
    double theta = 1.0;       // in [1/2, 1]: implicit Euler or Crank-Nicolson
    bool lumped_mass = false; // row-sum mass lumping (improves nodal positivity)

    void validate() const;
    double dt() const { return T / nt; }
};

struct SolveResult {
    std::vector<double> times;                  // forward times 0 = t_0 < ... < t_nt = T
    std::vector<Eigen::VectorXd> snapshots;     // interior nodal values per time
    std::vector<double> l2_norm_history;        // weighted L2 norm (consistent mass)
};

// Theta-scheme for the forward problem: from u^0 = 0,
//   (M + theta dt A) u^{n+1} = (M - (1-theta) dt A) u^n + dt F(t_{n+theta}).
// The moving source line is re-quadratured every step. Linear solves use a
// sparse LU factorization; non-finite results abort with NumericalError.
SolveResult solve(const FormMatrices& fm, const TruncatedDomain& dom,
                  const QuadratureRule& quad, const HestonParams& p,
                  const VariationalParams& vp, const OptionSpec& spec, const TimeGrid& tg);

// Same stepping with F = 0 and an injected initial state (decay and
// positivity diagnostics).
SolveResult evolve_homogeneous(const FormMatrices& fm, const TruncatedDomain& dom,
                               const TimeGrid& tg, const Eigen::VectorXd& u0);

// Discrete quasi-contractivity induced by the certified shift c2: checks
//   ||u^{n+1}|| <= (1 + dt c2)^{-1} ||u^n||
// at every step of an implicit-Euler, source-free history.
bool decay_check(const SolveResult& sr, const TimeGrid& tg, double c2,
                 double rel_tol = 1e-10);

struct PositivityReport {
    double min_value = 0.0;
    double max_value = 0.0;
    bool pass = false; // min >= -1e-6 * max over all snapshots
};

PositivityReport positivity_check(const SolveResult& sr);

struct PriceSurface {
    std::vector<double> s_grid;
    std::vector<double> y_grid;
    Eigen::MatrixXd values; // U(0, S_i, y_j) at row i, column j
    std::vector<std::pair<int, int>> out_of_range;
};

// Recovered option prices at calendar time 0 on a requested (S, y) grid:
// bilinear interpolation of the final snapshot composed with the inverse
// transform. Out-of-range grid points are reported and left as NaN.
PriceSurface price_surface(const SolveResult& sr, const TruncatedDomain& dom,
                           const HestonParams& p, const VariationalParams& vp,
                           const OptionSpec& spec, const std::vector<double>& s_grid,
                           const std::vector<double>& y_grid);

} // namespace hestonvar
