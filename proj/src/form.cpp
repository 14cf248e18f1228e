#include "hestonvar/form.hpp"

#include <cmath>
#include <vector>

#include "hestonvar/errors.hpp"

namespace hestonvar {

namespace {

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Pointwise coefficients of the form grouped by derivative pairing:
//   cxx du/dx dv/dx + cyy du/dy dv/dy + cyx du/dy dv/dx
//   + cx du/dx v + cy du/dy v + c0 u v.
struct FormCoeffs {
    double cxx, cyy, cyx, cx, cy, c0;
};

FormCoeffs form_coeffs(double x, double y, const HestonParams& p,
                       const VariationalParams& vp, std::uint32_t terms) {
    const double s = p.sigma, s2 = s * s, w = vp.omega, sx = sign0(x);
    FormCoeffs c{0, 0, 0, 0, 0, 0};
    if (terms & kTermXX) c.cxx += 0.5 * y;
    if (terms & kTermYY) c.cyy += 0.5 * s2 * y;
    if (terms & kTermYX) c.cyx += p.rho * s * y;
    if (terms & kTermXPhi) c.cx += vp.nu * sx * y;
    if (terms & kTermXOmegaRho) c.cx -= w * p.rho * s * y * y;
    if (terms & kTermXHalfY) c.cx += 0.5 * y;
    if (terms & kTermXRate) c.cx -= p.r;
    if (terms & kTermYConst) c.cy += 0.5 * s2;
    if (terms & kTermYMu) c.cy += vp.mu * s2 * y * y;
    if (terms & kTermYPhi) c.cy += 2.0 * p.rho * s * vp.nu * sx * y;
    if (terms & kTermYOmega) c.cy -= w * s2 * y * y;
    if (terms & kTermYKm) c.cy -= p.kappa * p.m;
    if (terms & kTermYKy) c.cy += p.kappa * y;
    if (terms & kTermZeroOmega2) c.c0 -= 0.5 * w * w * s2 * y * y * y;
    if (terms & kTermZeroOmegaS) c.c0 -= 0.5 * w * s2 * y;
    if (terms & kTermZeroOmegaKm) c.c0 -= w * p.kappa * p.m * y;
    if (terms & kTermZeroOmegaK) c.c0 += w * p.kappa * y * y;
    if (terms & kTermZeroRate) c.c0 += p.r;
    return c;
}

} // namespace

FormMatrices assemble(const TruncatedDomain& dom, const QuadratureRule& quad,
                      const HestonParams& p, const VariationalParams& vp,
                      std::uint32_t terms) {
    dom.validate();
    const int n = dom.interior_count();
    const double hx = dom.hx(), hy = dom.hy();
    const auto& g = quad.rule;
    const int q = quad.order;

    std::vector<Eigen::Triplet<double>> trips_a, trips_m;
    trips_a.reserve(static_cast<std::size_t>(dom.nx) * dom.ny * 16);
    trips_m.reserve(trips_a.capacity());

    double aloc[4][4], mloc[4][4];
    for (int cy = 0; cy < dom.ny; ++cy) {
        for (int cx = 0; cx < dom.nx; ++cx) {
            for (auto& row : aloc)
                for (auto& vv : row) vv = 0.0;
            for (auto& row : mloc)
                for (auto& vv : row) vv = 0.0;
            const double x0 = dom.x(cx), y0 = dom.y(cy);
            for (int jq = 0; jq < q; ++jq) {
                const double sy = 0.5 * (1.0 + g.nodes[jq]);
                const double wy = 0.5 * g.weights[jq] * hy;
                const double y = y0 + sy * hy;
                for (int iq = 0; iq < q; ++iq) {
                    const double sx = 0.5 * (1.0 + g.nodes[iq]);
                    const double wx = 0.5 * g.weights[iq] * hx;
                    const double x = x0 + sx * hx;
                    const double phi = weight_phi(x, vp.nu);
                    const double psi = weight_psi(y, vp.mu);
                    const double w = wx * wy * phi * phi * psi * psi;
                    const FormCoeffs cf = form_coeffs(x, y, p, vp, terms);

                    const double N[4] = {(1.0 - sx) * (1.0 - sy), sx * (1.0 - sy),
                                         (1.0 - sx) * sy, sx * sy};
                    const double Nx[4] = {-(1.0 - sy) / hx, (1.0 - sy) / hx, -sy / hx, sy / hx};
                    const double Ny[4] = {-(1.0 - sx) / hy, -sx / hy, (1.0 - sx) / hy, sx / hy};

                    for (int i = 0; i < 4; ++i) { // test function index
                        for (int j = 0; j < 4; ++j) { // trial function index
                            aloc[i][j] += w * (cf.cxx * Nx[j] * Nx[i] + cf.cyy * Ny[j] * Ny[i] +
                                               cf.cyx * Ny[j] * Nx[i] + cf.cx * Nx[j] * N[i] +
                                               cf.cy * Ny[j] * N[i] + cf.c0 * N[j] * N[i]);
                            mloc[i][j] += w * N[j] * N[i];
                        }
                    }
                }
            }
            const int ixs[4] = {cx, cx + 1, cx, cx + 1};
            const int iys[4] = {cy, cy, cy + 1, cy + 1};
            for (int i = 0; i < 4; ++i) {
                if (ixs[i] <= 0 || ixs[i] >= dom.nx || iys[i] <= 0 || iys[i] >= dom.ny) continue;
                const int gi = dom.interior_index(ixs[i], iys[i]);
                for (int j = 0; j < 4; ++j) {
                    if (ixs[j] <= 0 || ixs[j] >= dom.nx || iys[j] <= 0 || iys[j] >= dom.ny)
                        continue;
                    const int gj = dom.interior_index(ixs[j], iys[j]);
                    trips_a.emplace_back(gi, gj, aloc[i][j]);
                    trips_m.emplace_back(gi, gj, mloc[i][j]);
                }
            }
        }
    }

    FormMatrices fm;
    fm.stiffness.resize(n, n);
    fm.mass.resize(n, n);
    fm.stiffness.setFromTriplets(trips_a.begin(), trips_a.end());
    fm.mass.setFromTriplets(trips_m.begin(), trips_m.end());
    fm.stiffness.makeCompressed();
    fm.mass.makeCompressed();
    return fm;
}

Eigen::VectorXd dirac_source(double t, const TruncatedDomain& dom, const QuadratureRule& quad,
                             const HestonParams& p, const VariationalParams& vp,
                             const OptionSpec& spec) {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(dom.interior_count());
    const double xs = std::log(spec.strike) - p.r * t;
    if (xs < dom.x_min || xs > dom.x_max) return F;

    const double hx = dom.hx(), hy = dom.hy();
    int cx = static_cast<int>(std::floor((xs - dom.x_min) / hx));
    cx = std::min(std::max(cx, 0), dom.nx - 1);
    const double sx = (xs - dom.x(cx)) / hx;
    const double phi = weight_phi(xs, vp.nu);
    const double scale = 0.5 * spec.strike * std::exp(-p.r * t) * phi * phi;

    // x-direction hat weights at the line location.
    const int x_nodes[2] = {cx, cx + 1};
    const double x_w[2] = {1.0 - sx, sx};

    // 1-D quadrature of y * exp(-(omega/2) y^2) psi^2(y) against the y hats.
    const auto& g = quad.rule;
    for (int cyc = 0; cyc < dom.ny; ++cyc) {
        const double y0 = dom.y(cyc);
        for (int jq = 0; jq < quad.order; ++jq) {
            const double sy = 0.5 * (1.0 + g.nodes[jq]);
            const double wy = 0.5 * g.weights[jq] * hy;
            const double y = y0 + sy * hy;
            const double psi = weight_psi(y, vp.mu);
            const double val = wy * y * std::exp(-0.5 * vp.omega * y * y) * psi * psi;
            const int y_nodes[2] = {cyc, cyc + 1};
            const double y_w[2] = {1.0 - sy, sy};
            for (int a = 0; a < 2; ++a) {
                if (x_nodes[a] <= 0 || x_nodes[a] >= dom.nx) continue;
                for (int b = 0; b < 2; ++b) {
                    if (y_nodes[b] <= 0 || y_nodes[b] >= dom.ny) continue;
                    F[dom.interior_index(x_nodes[a], y_nodes[b])] +=
                        scale * x_w[a] * y_w[b] * val;
                }
            }
        }
    }
    return F;
}

namespace {

// Quadrature of integrand(x, y) * phi^2 psi^2 over the domain.
double weighted_integral(const std::function<double(double, double)>& integrand,
                         const TruncatedDomain& dom, const QuadratureRule& quad, double nu,
                         double mu) {
    const double hx = dom.hx(), hy = dom.hy();
    const auto& g = quad.rule;
    double total = 0.0;
    for (int cy = 0; cy < dom.ny; ++cy) {
        double row = 0.0;
        for (int cx = 0; cx < dom.nx; ++cx) {
            const double x0 = dom.x(cx), y0 = dom.y(cy);
            for (int jq = 0; jq < quad.order; ++jq) {
                const double y = y0 + 0.5 * (1.0 + g.nodes[jq]) * hy;
                const double wy = 0.5 * g.weights[jq] * hy;
                for (int iq = 0; iq < quad.order; ++iq) {
                    const double x = x0 + 0.5 * (1.0 + g.nodes[iq]) * hx;
                    const double wx = 0.5 * g.weights[iq] * hx;
                    const double phi = weight_phi(x, nu);
                    const double psi = weight_psi(y, mu);
                    row += wx * wy * phi * phi * psi * psi * integrand(x, y);
                }
            }
        }
        total += row;
    }
    return total;
}

double rel_residual(double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / scale;
}

} // namespace

IbpResiduals check_ibp_identities(const SmoothField& u, const SmoothField& v,
                                  const TruncatedDomain& dom, const QuadratureRule& quad,
                                  double nu, double mu) {
    auto I = [&](const std::function<double(double, double)>& f) {
        return weighted_integral(f, dom, quad, nu, mu);
    };
    const double uv_y1 = I([&](double x, double y) { return y * u.f(x, y) * v.f(x, y); });
    const double uv_y2 = I([&](double x, double y) { return y * y * u.f(x, y) * v.f(x, y); });
    const double uv_y3 =
        I([&](double x, double y) { return y * y * y * u.f(x, y) * v.f(x, y); });
    const double uv = I([&](double x, double y) { return u.f(x, y) * v.f(x, y); });
    const double uy_v = I([&](double x, double y) { return u.fy(x, y) * v.f(x, y); });
    const double u_vy = I([&](double x, double y) { return u.f(x, y) * v.fy(x, y); });
    const double uy_v_y = I([&](double x, double y) { return y * u.fy(x, y) * v.f(x, y); });
    const double u_vy_y = I([&](double x, double y) { return y * u.f(x, y) * v.fy(x, y); });
    const double uy_v_y2 =
        I([&](double x, double y) { return y * y * u.fy(x, y) * v.f(x, y); });
    const double u_vy_y2 =
        I([&](double x, double y) { return y * y * u.f(x, y) * v.fy(x, y); });

    IbpResiduals res;
    res.first = rel_residual(uv_y1, -(uy_v + u_vy) / (2.0 * mu));
    res.second = rel_residual(uv_y2, -(uy_v_y + u_vy_y + uv) / (2.0 * mu));
    res.third = rel_residual(uv_y3, -(2.0 * uv_y1 + uy_v_y2 + u_vy_y2) / (2.0 * mu));
    return res;
}

double garding_residual(const DiscreteFunction& v, const FormMatrices& fm,
                        const CoercivityCertificate& cert, const TruncatedDomain& dom,
                        const QuadratureRule& quad) {
    if (!cert.certified) throw Error("garding_residual: certificate is not valid");
    const double quad_form = v.values.dot(fm.stiffness * v.values);
    const double vn = v_norm(v, dom, quad, cert.vp.nu, cert.vp.mu);
    const double l2 = weighted_l2_norm(v, dom, quad, cert.vp.nu, cert.vp.mu);
    return quad_form - cert.c1 * vn * vn - cert.c2 * l2 * l2;
}

double continuity_ratio(const DiscreteFunction& u, const DiscreteFunction& v,
                        const FormMatrices& fm, const TruncatedDomain& dom,
                        const QuadratureRule& quad, const VariationalParams& vp) {
    const double un = v_norm(u, dom, quad, vp.nu, vp.mu);
    const double vn = v_norm(v, dom, quad, vp.nu, vp.mu);
    if (!(un > 0.0) || !(vn > 0.0))
        throw Error("continuity_ratio: arguments must be nonzero");
    const double a_uv = v.values.dot(fm.stiffness * u.values);
    return std::abs(a_uv) / (un * vn);
}

double continuity_bound(const HestonParams& p, const VariationalParams& vp) {
    const double s = p.sigma, s2 = s * s, w = vp.omega, rho = std::abs(p.rho);
    const double ca = 1.0 / std::sqrt(vp.a);   // ||dv/dx|| or ||dv/dy|| control
    const double cy = 1.0 / (vp.a * vp.mu);    // ||sqrt(y) v|| control
    const double cm = 1.0 / vp.mu;             // ||y^{3/2} v|| control
    double M = 0.0;
    M += 0.5;                        // y ux vx
    M += vp.nu * cy;                 // y ux v (phi'/phi)
    M += 0.5 * s2;                   // y uy vy
    M += 0.5 * s2 * ca;              // uy v
    M += s2;                         // mu s^2 y^2 uy v
    M += 2.0 * rho * s * vp.nu * cy; // 2 rho s y uy v (phi'/phi)
    M += rho * s;                    // rho s y uy vx
    M += w * rho * s * cm + 0.5 * cy + p.r * ca;          // (w rho s y^2 - y/2 + r) ux v
    M += w * s2 * cm + p.kappa * p.m * ca + p.kappa * cy; // (w s^2 y^2 + k(m-y)) uy v
    M += 0.5 * w * w * s2 * cm * cm + 0.5 * w * s2 * cy * cy +
         w * p.kappa * p.m * cy * cy + w * p.kappa * cy * cm + p.r; // zero-order block
    return M;
}

} // namespace hestonvar
