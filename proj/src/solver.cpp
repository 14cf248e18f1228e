#include "hestonvar/solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "hestonvar/errors.hpp"

namespace hestonvar {

void TimeGrid::validate() const {
    if (!(T > 0.0)) throw Error("TimeGrid: T must be positive");
    if (nt < 1) throw Error("TimeGrid: need at least one step");
    if (!(theta >= 0.5 && theta <= 1.0)) throw Error("TimeGrid: theta must lie in [1/2, 1]");
}

namespace {

Eigen::SparseMatrix<double> lump(const Eigen::SparseMatrix<double>& mass) {
    Eigen::VectorXd rowsum = mass * Eigen::VectorXd::Ones(mass.rows());
    Eigen::SparseMatrix<double> d(mass.rows(), mass.cols());
    d.reserve(Eigen::VectorXi::Constant(mass.cols(), 1));
    for (int i = 0; i < mass.rows(); ++i) d.insert(i, i) = rowsum[i];
    d.makeCompressed();
    return d;
}

// Shared theta-stepping loop. source(t) supplies the load at a requested
// time; a null source means the homogeneous problem.
SolveResult step_theta(const FormMatrices& fm, const TimeGrid& tg,
                       const Eigen::VectorXd& u0,
                       const std::function<Eigen::VectorXd(double)>* source) {
    tg.validate();
    const double dt = tg.dt();
    const Eigen::SparseMatrix<double> M = tg.lumped_mass ? lump(fm.mass) : fm.mass;
    Eigen::SparseMatrix<double> lhs = M + tg.theta * dt * fm.stiffness;
    Eigen::SparseMatrix<double> rhs_op = M - (1.0 - tg.theta) * dt * fm.stiffness;
    lhs.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(lhs);
    if (lu.info() != Eigen::Success)
        throw NumericalError("solve: stepping matrix factorization failed (" +
                             std::string(lu.lastErrorMessage()) + ")");

    SolveResult sr;
    sr.times.reserve(tg.nt + 1);
    sr.snapshots.reserve(tg.nt + 1);
    sr.l2_norm_history.reserve(tg.nt + 1);

    Eigen::VectorXd u = u0;
    auto record = [&](double t) {
        sr.times.push_back(t);
        sr.snapshots.push_back(u);
        // Weighted L2 norm through the consistent mass matrix.
        sr.l2_norm_history.push_back(std::sqrt(std::max(0.0, u.dot(fm.mass * u))));
    };
    record(0.0);

    for (int n = 0; n < tg.nt; ++n) {
        Eigen::VectorXd b = rhs_op * u;
        if (source) b += dt * (*source)((n + tg.theta) * dt);
        u = lu.solve(b);
        if (!u.allFinite())
            throw NumericalError("solve: non-finite values at step " + std::to_string(n + 1));
        record((n + 1.0) * dt);
    }
    return sr;
}

} // namespace

SolveResult solve(const FormMatrices& fm, const TruncatedDomain& dom,
                  const QuadratureRule& quad, const HestonParams& p,
                  const VariationalParams& vp, const OptionSpec& spec, const TimeGrid& tg) {
    std::function<Eigen::VectorXd(double)> src = [&](double t) {
        return dirac_source(t, dom, quad, p, vp, spec);
    };
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dom.interior_count());
    return step_theta(fm, tg, zero, &src);
}

SolveResult evolve_homogeneous(const FormMatrices& fm, const TruncatedDomain& dom,
                               const TimeGrid& tg, const Eigen::VectorXd& u0) {
    if (u0.size() != dom.interior_count())
        throw Error("evolve_homogeneous: initial state has wrong size");
    return step_theta(fm, tg, u0, nullptr);
}

bool decay_check(const SolveResult& sr, const TimeGrid& tg, double c2, double rel_tol) {
    const double dt = tg.dt();
    if (!(tg.theta == 1.0)) throw Error("decay_check: requires implicit Euler (theta = 1)");
    if (!(1.0 + dt * c2 > 0.0))
        throw Error("decay_check: need 1 + dt c2 > 0 for a meaningful bound");
    const double factor = 1.0 / (1.0 + dt * c2);
    for (std::size_t n = 0; n + 1 < sr.l2_norm_history.size(); ++n) {
        const double bound = factor * sr.l2_norm_history[n];
        if (sr.l2_norm_history[n + 1] > bound * (1.0 + rel_tol)) return false;
    }
    return true;
}

PositivityReport positivity_check(const SolveResult& sr) {
    PositivityReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    rep.max_value = -std::numeric_limits<double>::infinity();
    for (const auto& snap : sr.snapshots) {
        if (snap.size() == 0) continue;
        rep.min_value = std::min(rep.min_value, snap.minCoeff());
        rep.max_value = std::max(rep.max_value, snap.maxCoeff());
    }
    rep.pass = rep.min_value >= -1e-6 * std::max(rep.max_value, 0.0);
    return rep;
}

PriceSurface price_surface(const SolveResult& sr, const TruncatedDomain& dom,
                           const HestonParams& p, const VariationalParams& vp,
                           const OptionSpec& spec, const std::vector<double>& s_grid,
                           const std::vector<double>& y_grid) {
    if (sr.snapshots.empty()) throw Error("price_surface: empty solve result");
    DiscreteFunction final_state{sr.snapshots.back()};

    PriceSurface ps;
    ps.s_grid = s_grid;
    ps.y_grid = y_grid;
    ps.values.resize(static_cast<int>(s_grid.size()), static_cast<int>(y_grid.size()));
    ps.values.setConstant(std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < static_cast<int>(s_grid.size()); ++i) {
        const double S = s_grid[i];
        const double x = S > 0.0 ? std::log(S) : -std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(y_grid.size()); ++j) {
            const double y = y_grid[j];
            if (!(S > 0.0) || x < dom.x_min || x > dom.x_max || y < dom.a || y > dom.y_max) {
                ps.out_of_range.emplace_back(i, j);
                continue;
            }
            const double u_val = final_state.evaluate(dom, x, y);
            ps.values(i, j) = recover_price(u_val, 0.0, S, y, spec, p, vp.omega);
        }
    }
    return ps;
}

} // namespace hestonvar
