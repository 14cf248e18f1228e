#include "hestonvar/wspace.hpp"

#include <cmath>

#include "hestonvar/errors.hpp"

namespace hestonvar {

void TruncatedDomain::validate() const {
    if (!(x_min < x_max)) throw Error("TruncatedDomain: x_min must be below x_max");
    if (!(a > 0.0)) throw Error("TruncatedDomain: a must be positive");
    if (!(a < y_max)) throw Error("TruncatedDomain: a must be below y_max");
    if (nx < 2 || ny < 2) throw Error("TruncatedDomain: need at least 2 cells per axis");
}

QuadratureRule QuadratureRule::make(int q) {
    if (q < 3) throw Error("QuadratureRule: order must be at least 3");
    QuadratureRule quad;
    quad.order = q;
    quad.rule = gauss_legendre(q);
    return quad;
}

double weight_phi(double x, double nu) { return std::exp(nu * std::abs(x)); }

double weight_psi(double y, double mu) { return std::exp(0.5 * mu * y * y); }

double DiscreteFunction::evaluate(const TruncatedDomain& dom, double x, double y) const {
    const double hx = dom.hx(), hy = dom.hy();
    int cx = static_cast<int>(std::floor((x - dom.x_min) / hx));
    int cy = static_cast<int>(std::floor((y - dom.a) / hy));
    cx = std::min(std::max(cx, 0), dom.nx - 1);
    cy = std::min(std::max(cy, 0), dom.ny - 1);
    const double sx = (x - dom.x(cx)) / hx;
    const double sy = (y - dom.y(cy)) / hy;

    auto nodal = [&](int ix, int iy) -> double {
        if (ix <= 0 || ix >= dom.nx || iy <= 0 || iy >= dom.ny) return 0.0;
        return values[dom.interior_index(ix, iy)];
    };
    return (1.0 - sx) * (1.0 - sy) * nodal(cx, cy) + sx * (1.0 - sy) * nodal(cx + 1, cy) +
           (1.0 - sx) * sy * nodal(cx, cy + 1) + sx * sy * nodal(cx + 1, cy + 1);
}

DiscreteFunction project(const std::function<double(double, double)>& f,
                         const TruncatedDomain& dom) {
    DiscreteFunction v;
    v.values.resize(dom.interior_count());
    for (int iy = 1; iy <= dom.ny - 1; ++iy)
        for (int ix = 1; ix <= dom.nx - 1; ++ix)
            v.values[dom.interior_index(ix, iy)] = f(dom.x(ix), dom.y(iy));
    return v;
}

namespace {

// Accumulates cell-quadrature sums of |v|^2, y|dv/dx|^2 and y|dv/dy|^2
// against phi^2 psi^2 in a fixed cell order.
struct NormSums {
    double l2 = 0.0;
    double grad_x = 0.0;
    double grad_y = 0.0;
};

NormSums accumulate_norms(const DiscreteFunction& v, const TruncatedDomain& dom,
                          const QuadratureRule& quad, double nu, double mu) {
    const double hx = dom.hx(), hy = dom.hy();
    const auto& g = quad.rule;
    const int q = quad.order;
    NormSums sums;
    for (int cy = 0; cy < dom.ny; ++cy) {
        NormSums row; // per-row partial keeps the reduction order fixed
        for (int cx = 0; cx < dom.nx; ++cx) {
            double c[4] = {0.0, 0.0, 0.0, 0.0}; // local nodal values
            const int ixs[2] = {cx, cx + 1}, iys[2] = {cy, cy + 1};
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i) {
                    const int ix = ixs[i], iy = iys[j];
                    if (ix > 0 && ix < dom.nx && iy > 0 && iy < dom.ny)
                        c[2 * j + i] = v.values[dom.interior_index(ix, iy)];
                }
            const double x0 = dom.x(cx), y0 = dom.y(cy);
            for (int jq = 0; jq < q; ++jq) {
                const double sy = 0.5 * (1.0 + g.nodes[jq]);
                const double wy = 0.5 * g.weights[jq] * hy;
                const double y = y0 + sy * hy;
                for (int iq = 0; iq < q; ++iq) {
                    const double sx = 0.5 * (1.0 + g.nodes[iq]);
                    const double wx = 0.5 * g.weights[iq] * hx;
                    const double x = x0 + sx * hx;
                    const double phi = weight_phi(x, nu);
                    const double psi = weight_psi(y, mu);
                    const double w = wx * wy * phi * phi * psi * psi;
                    const double val = (1.0 - sx) * (1.0 - sy) * c[0] + sx * (1.0 - sy) * c[1] +
                                       (1.0 - sx) * sy * c[2] + sx * sy * c[3];
                    const double dx = ((1.0 - sy) * (c[1] - c[0]) + sy * (c[3] - c[2])) / hx;
                    const double dy = ((1.0 - sx) * (c[2] - c[0]) + sx * (c[3] - c[1])) / hy;
                    row.l2 += w * val * val;
                    row.grad_x += w * y * dx * dx;
                    row.grad_y += w * y * dy * dy;
                }
            }
        }
        sums.l2 += row.l2;
        sums.grad_x += row.grad_x;
        sums.grad_y += row.grad_y;
    }
    return sums;
}

} // namespace

double weighted_l2_norm(const DiscreteFunction& v, const TruncatedDomain& dom,
                        const QuadratureRule& quad, double nu, double mu) {
    return std::sqrt(accumulate_norms(v, dom, quad, nu, mu).l2);
}

double v_norm(const DiscreteFunction& v, const TruncatedDomain& dom,
              const QuadratureRule& quad, double nu, double mu) {
    const NormSums s = accumulate_norms(v, dom, quad, nu, mu);
    return std::sqrt(s.l2 + s.grad_x + s.grad_y);
}

} // namespace hestonvar
