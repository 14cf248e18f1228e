#include "hestonvar/coercivity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "hestonvar/errors.hpp"

namespace hestonvar {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dtos(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}
} // namespace

void VariationalParams::validate() const {
    if (!(a > 0.0)) throw Error("VariationalParams: a must be positive");
    if (!(nu > 0.0)) throw Error("VariationalParams: nu must be positive");
    if (!(mu > 0.0)) throw Error("VariationalParams: mu must be positive");
    if (!(omega > mu)) throw Error("VariationalParams: omega must exceed mu");
}

void EpsilonTriple::validate() const {
    if (!(eps1 > 0.0 && eps2 > 0.0 && eps3 > 0.0))
        throw Error("EpsilonTriple: all entries must be positive");
}

double delta_max(const HestonParams& p) {
    const double margin = feller_margin(p);
    if (!(margin > 0.0))
        throw InfeasibleError("delta_max: Feller margin must be positive");
    const double ratio = margin / (p.sigma * p.sigma);
    return ratio * ratio;
}

double rho_bound(double delta) {
    if (!(delta > 0.0)) throw Error("rho_bound: delta must be positive");
    return std::sqrt(0.5 - 0.5 / std::sqrt(1.0 + delta));
}

AuxConstants aux_constants(const HestonParams& p, const VariationalParams& vp,
                           const EpsilonTriple& eps, double delta) {
    if (!(delta > 0.0)) throw Error("aux_constants: delta must be positive");
    AuxConstants aux;
    aux.delta = delta;
    aux.tbar = 1.0 + 1.0 / std::sqrt(1.0 + delta);
    aux.tau = 1.0 - p.rho * p.rho / eps.eps2;
    aux.gamma = 2.0 * aux.tau / aux.tbar - 1.0;
    aux.beta = vp.nu * vp.nu / (2.0 * eps.eps1) + 0.5 * vp.nu;
    aux.c = 2.0 * aux.beta / (vp.mu * p.sigma * p.sigma);
    return aux;
}

AlphaCoefficients alpha_coefficients(const HestonParams& p, const VariationalParams& vp,
                                     const EpsilonTriple& eps, const AuxConstants& aux) {
    const double s2 = p.sigma * p.sigma;
    const double km = p.kappa * p.m - 0.5 * s2; // Feller margin
    AlphaCoefficients al;
    al.alpha1 = 0.5 * (1.0 - eps.eps1 - eps.eps2);
    al.alpha2 = 0.5 * s2 * (1.0 - p.rho * p.rho / eps.eps2);
    al.alpha3 = -p.r * vp.nu - 0.5 * p.kappa - p.rho * p.sigma * vp.nu + p.r;
    al.alpha4 = vp.omega * p.kappa - p.kappa * vp.mu - vp.omega * p.rho * p.sigma * vp.nu -
                2.0 * p.rho * p.sigma * vp.nu * vp.mu;
    al.alpha5 = vp.omega * km + s2 * vp.mu + aux.beta - km * vp.mu;
    al.alpha6 = vp.mu * al.alpha5 + vp.omega * vp.mu * s2 - s2 * vp.mu * vp.mu -
                0.5 * vp.omega * vp.omega * s2;
    return al;
}

std::optional<double> nu_bound(const HestonParams& p, const VariationalParams& vp) {
    if (!(vp.omega > vp.mu)) throw Error("nu_bound: omega must exceed mu");
    if (p.rho <= 0.0) return std::nullopt; // constraint only binds for 0 < rho < 1
    return p.kappa * (vp.omega - vp.mu) / (p.rho * p.sigma * (vp.omega + 2.0 * vp.mu));
}

GatingValues gating_functions(double t, const AuxConstants& aux) {
    const double c = aux.c, gamma = aux.gamma;
    if (std::abs(t - 1.0) < 1e-12 * std::max(1.0, std::abs(t)))
        throw NumericalError("gating_functions: t too close to the pole at 1");
    const double ftilde_den = t * (1.0 + 2.0 * gamma) - (2.0 + 2.0 * gamma);
    if (std::abs(ftilde_den) < 1e-14 * (2.0 + 2.0 * std::abs(gamma)))
        throw NumericalError("gating_functions: f~ evaluated too close to its pole");
    GatingValues gv;
    const double tm1 = t - 1.0;
    gv.g = ((2.0 + c) * t - (1.0 + c) * t * t) / (tm1 * tm1);
    gv.f = t / tm1 * (gamma - 0.5 * c);
    gv.f_tilde = t / ftilde_den * (gamma - 0.5 * c) * (gamma - 0.5 * c);
    return gv;
}

OmegaInterval omega_interval(const HestonParams& p, const VariationalParams& vp,
                             const EpsilonTriple& eps, const AuxConstants& aux,
                             const AlphaCoefficients& alphas) {
    (void)alphas;
    const double s2 = p.sigma * p.sigma;
    const double km = feller_margin(p);
    const double mu = vp.mu, e3 = eps.eps3;
    const double d1 = mu - 1.0 / (2.0 * e3);
    OmegaInterval iv;
    iv.delta_omega = km * km * d1 * d1 + mu * s2 * s2 * (mu - 1.0 / e3) + 2.0 * aux.beta * s2 * d1;
    const double b = km * d1 + s2 * mu;
    const double sq = iv.delta_omega >= 0.0 ? std::sqrt(iv.delta_omega) : kInf;
    const double root_lo = (b - sq) / s2;
    const double root_hi = (b + sq) / s2;
    const double eq28_hi = mu + (aux.gamma * s2 * mu - aux.beta) / km;
    iv.lo = std::max(root_lo, mu);
    iv.hi = std::min(root_hi, eq28_hi);
    if (iv.delta_omega < 0.0) { // no real roots; leave an explicitly empty interval
        iv.lo = kInf;
        iv.hi = -kInf;
    }
    return iv;
}

Window eps3_window(const AlphaCoefficients& alphas, const AuxConstants& aux,
                   const VariationalParams& vp) {
    if (!(alphas.alpha5 > 0.0)) throw Error("eps3_window: alpha5 must be positive");
    Window w;
    w.lo = aux.tbar / (2.0 * vp.mu);
    w.hi = std::min(2.0 * alphas.alpha2 / alphas.alpha5,
                    (1.0 + 1.0 / (1.0 + 2.0 * aux.gamma)) / (2.0 * vp.mu));
    return w;
}

namespace {

struct ConstraintRecorder {
    std::vector<ConstraintCheck>& report;
    double margin;
    bool all_ok = true;

    // Open inequality: requires slack strictly above the margin.
    void strict(const std::string& id, double slack) {
        const bool ok = slack > margin;
        report.push_back({id, ok, slack});
        all_ok = all_ok && ok;
    }
    // Closed inequality: slack >= 0 suffices.
    void closed(const std::string& id, double slack) {
        const bool ok = slack >= 0.0;
        report.push_back({id, ok, slack});
        all_ok = all_ok && ok;
    }
};

} // namespace

CoercivityCertificate certify(const HestonParams& p, const VariationalParams& vp,
                              const EpsilonTriple& eps, double delta, double slack_margin) {
    p.validate();
    vp.validate();
    eps.validate();

    CoercivityCertificate cert;
    cert.model = p;
    cert.vp = vp;
    cert.eps = eps;
    cert.delta = delta;

    ConstraintRecorder rec{cert.constraints, slack_margin};

    const double feller = feller_margin(p);
    rec.strict("feller", feller);

    double dmax = -kInf;
    if (feller > 0.0) dmax = delta_max(p);
    rec.strict("delta-range", std::min(delta, dmax - delta));

    const double rho_cap = delta > 0.0 ? rho_bound(delta) : -kInf;
    rec.strict("rho-window", rho_cap - std::abs(p.rho));

    cert.aux = aux_constants(p, vp, eps, std::max(delta, 1e-300));
    cert.alphas = alpha_coefficients(p, vp, eps, cert.aux);
    const AuxConstants& aux = cert.aux;
    const AlphaCoefficients& al = cert.alphas;

    rec.strict("omega-gt-mu", vp.omega - vp.mu);

    // eps2 window: 2 rho^2/(2 - tbar) < eps2 < 1 - eps1.
    const double eps2_lo = 2.0 * p.rho * p.rho / (2.0 - aux.tbar);
    const double eps2_hi = 1.0 - eps.eps1;
    rec.strict("eps2-window", std::min(eps.eps2 - eps2_lo, eps2_hi - eps.eps2));

    rec.strict("gamma-positive", aux.gamma);

    if (p.rho > 0.0) {
        const double cap = *nu_bound(p, vp);
        rec.closed("nu-bound", cap - vp.nu);
    }
    rec.closed("alpha4-nonneg", al.alpha4);

    // beta < min{mu gamma sigma^2, mu (km) + mu sigma^2/(2 eps3 mu - 1)}.
    const double s2 = p.sigma * p.sigma;
    const double t = 2.0 * eps.eps3 * vp.mu;
    const double beta_cap =
        std::min(vp.mu * aux.gamma * s2, vp.mu * feller + vp.mu * s2 / (t - 1.0));
    rec.strict("beta-cap", beta_cap - aux.beta);

    double eps3_slack = -kInf;
    if (al.alpha5 > 0.0) {
        const Window w = eps3_window(al, aux, vp);
        eps3_slack = std::min(eps.eps3 - w.lo, w.hi - eps.eps3);
    }
    rec.strict("eps3-window", eps3_slack);

    const OmegaInterval iv = omega_interval(p, vp, eps, aux, al);
    cert.omega_lo = iv.lo;
    cert.omega_hi = iv.hi;
    cert.delta_omega = iv.delta_omega;
    rec.closed("delta-omega-nonneg", iv.delta_omega);
    rec.strict("omega-interval", std::min(vp.omega - iv.lo, iv.hi - vp.omega));

    const double eq20 = al.alpha2 - 0.5 * al.alpha5 * eps.eps3;
    rec.strict("eq20prime", eq20);
    const double eq21 = al.alpha6 - al.alpha5 / (2.0 * eps.eps3);
    rec.closed("eq21", eq21);

    // Gate functions at t = 2 eps3 mu. Pole proximity counts as failure.
    double g_slack = -kInf, f_slack = -kInf, ft_slack = -kInf;
    try {
        const GatingValues gv = gating_functions(t, aux);
        g_slack = delta - gv.g;
        f_slack = delta - gv.f;
        ft_slack = delta - gv.f_tilde;
    } catch (const NumericalError&) {
        // keep the -inf slacks
    }
    rec.closed("g-gate", g_slack);
    rec.closed("f-gate", f_slack);
    rec.strict("ftilde-gate", ft_slack);

    const double c1 =
        std::min({al.alpha1, eq20, vp.a * vp.a * vp.a * eq21});
    rec.strict("c1-positive", c1);

    cert.certified = rec.all_ok;
    if (cert.certified) {
        cert.c1 = c1;
        cert.c2 = al.alpha3;
    } else {
        cert.c1 = std::numeric_limits<double>::quiet_NaN();
        cert.c2 = std::numeric_limits<double>::quiet_NaN();
    }
    return cert;
}

std::string CoercivityCertificate::to_json() const {
    nlohmann::ordered_json j;
    j["kappa"] = dtos(model.kappa);
    j["m"] = dtos(model.m);
    j["sigma"] = dtos(model.sigma);
    j["rho"] = dtos(model.rho);
    j["r"] = dtos(model.r);
    j["eta"] = dtos(model.eta);
    j["a"] = dtos(vp.a);
    j["nu"] = dtos(vp.nu);
    j["mu"] = dtos(vp.mu);
    j["omega"] = dtos(vp.omega);
    j["eps1"] = dtos(eps.eps1);
    j["eps2"] = dtos(eps.eps2);
    j["eps3"] = dtos(eps.eps3);
    j["delta"] = dtos(delta);
    j["tbar"] = dtos(aux.tbar);
    j["tau"] = dtos(aux.tau);
    j["gamma"] = dtos(aux.gamma);
    j["beta"] = dtos(aux.beta);
    j["c"] = dtos(aux.c);
    j["alpha1"] = dtos(alphas.alpha1);
    j["alpha2"] = dtos(alphas.alpha2);
    j["alpha3"] = dtos(alphas.alpha3);
    j["alpha4"] = dtos(alphas.alpha4);
    j["alpha5"] = dtos(alphas.alpha5);
    j["alpha6"] = dtos(alphas.alpha6);
    j["omega_lo"] = dtos(omega_lo);
    j["omega_hi"] = dtos(omega_hi);
    j["delta_omega"] = dtos(delta_omega);
    j["certified"] = certified;
    j["c1"] = dtos(c1);
    j["c2"] = dtos(c2);
    for (const auto& ck : constraints) {
        std::string key = ck.id;
        std::replace(key.begin(), key.end(), '-', '_');
        j["constraint_" + key + "_satisfied"] = ck.satisfied;
        j["constraint_" + key + "_slack"] = dtos(ck.slack);
    }
    return j.dump(2);
}

namespace {

// Candidate evaluation bookkeeping for the feasibility search.
struct SearchState {
    bool found = false;
    double best_c1 = -kInf;
    SearchResult best;
    // Closest-to-feasible failure seen so far: most constraints satisfied,
    // then largest minimum failing slack.
    int fail_best_count = -1;
    double fail_best_slack = -kInf;
    std::string fail_constraint = "feller";

    void consider(const HestonParams& p, const VariationalParams& vp,
                  const EpsilonTriple& eps, double delta, double slack_margin) {
        const CoercivityCertificate cert = certify(p, vp, eps, delta, slack_margin);
        if (cert.certified) {
            if (cert.c1 > best_c1) {
                best_c1 = cert.c1;
                best = {vp, eps, delta, cert};
                found = true;
            }
            return;
        }
        int ok = 0;
        double worst = kInf;
        std::string worst_id;
        for (const auto& ck : cert.constraints) {
            if (ck.satisfied) {
                ++ok;
            } else if (ck.slack < worst) {
                worst = ck.slack;
                worst_id = ck.id;
            }
        }
        if (ok > fail_best_count || (ok == fail_best_count && worst > fail_best_slack)) {
            fail_best_count = ok;
            fail_best_slack = worst;
            fail_constraint = worst_id;
        }
    }
};

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(llo + (lhi - llo) * i / double(n - 1));
    return g;
}

// Enumerates (eps1, eps2, omega, eps3) inside their analytic windows for a
// fixed (delta, nu, mu) and feeds every candidate to the search state.
void scan_windows(const HestonParams& p, double a, double delta, double nu, double mu,
                  const std::vector<double>& eps1_grid, const std::vector<double>& fracs,
                  double slack_margin, SearchState& state) {
    const double s2 = p.sigma * p.sigma;
    const double km = feller_margin(p);
    const double tbar = 1.0 + 1.0 / std::sqrt(1.0 + delta);
    const double eps2_lo = 2.0 * p.rho * p.rho / (2.0 - tbar);

    for (double eps1 : eps1_grid) {
        const double eps2_hi = 1.0 - eps1;
        if (!(eps2_lo < eps2_hi)) continue;
        for (double f2 : fracs) {
            const double eps2 = eps2_lo + f2 * (eps2_hi - eps2_lo);
            const double tau = 1.0 - p.rho * p.rho / eps2;
            const double gamma = 2.0 * tau / tbar - 1.0;
            if (!(gamma > 0.0)) continue;
            const double beta = nu * nu / (2.0 * eps1) + 0.5 * nu;
            const double omega_cap = mu + (gamma * s2 * mu - beta) / km;
            if (!(omega_cap > mu)) continue; // beta >= mu gamma sigma^2
            for (double fw : fracs) {
                const double omega = mu + fw * (omega_cap - mu);
                const double alpha2 = 0.5 * s2 * tau;
                const double alpha5 = (omega - mu) * km + s2 * mu + beta;
                const double e3_lo = tbar / (2.0 * mu);
                const double e3_hi = std::min(2.0 * alpha2 / alpha5,
                                              (1.0 + 1.0 / (1.0 + 2.0 * gamma)) / (2.0 * mu));
                if (!(e3_lo < e3_hi)) continue;
                for (double f3 : fracs) {
                    const double eps3 = e3_lo + f3 * (e3_hi - e3_lo);
                    state.consider(p, VariationalParams{a, nu, mu, omega},
                                   EpsilonTriple{eps1, eps2, eps3}, delta, slack_margin);
                }
            }
        }
    }
}

} // namespace

SearchOutcome search_feasible(const HestonParams& p, const SearchOptions& opts) {
    p.validate();
    SearchOutcome outcome;
    if (!(feller_margin(p) > 0.0)) {
        outcome.tightest_constraint = "feller";
        outcome.tightest_slack = feller_margin(p);
        return outcome;
    }
    const double dmax = delta_max(p);

    SearchState state;
    const std::vector<double> delta_fracs = {0.1, 0.25, 0.5, 0.75, 0.9};
    const std::vector<double> eps1_coarse = {0.05, 0.1, 0.2, 0.3, 0.4};
    const std::vector<double> fracs_coarse = {0.2, 0.4, 0.6, 0.8};
    const std::vector<double> nu_grid = log_grid(opts.nu_min, opts.nu_max, opts.nu_points);
    const std::vector<double> mu_grid = log_grid(opts.mu_min, opts.mu_max, opts.mu_points);

    for (double df : delta_fracs) {
        const double delta = df * dmax;
        if (!(std::abs(p.rho) < rho_bound(delta))) continue;
        for (double nu : nu_grid)
            for (double mu : mu_grid)
                scan_windows(p, opts.a, delta, nu, mu, eps1_coarse, fracs_coarse,
                             opts.slack_margin, state);
    }

    if (state.found) {
        // Refinement pass around the coarse optimum.
        const SearchResult coarse = state.best;
        const double nu_step = std::pow(opts.nu_max / opts.nu_min, 1.0 / (opts.nu_points - 1));
        const double mu_step = std::pow(opts.mu_max / opts.mu_min, 1.0 / (opts.mu_points - 1));
        const std::vector<double> nu_fine =
            log_grid(coarse.vp.nu / nu_step, std::min(coarse.vp.nu * nu_step, opts.nu_max), 7);
        const std::vector<double> mu_fine =
            log_grid(coarse.vp.mu / mu_step, std::min(coarse.vp.mu * mu_step, opts.mu_max), 7);
        std::vector<double> eps1_fine;
        for (int i = -2; i <= 2; ++i) {
            const double e1 = coarse.eps.eps1 + 0.025 * i;
            if (e1 > 1e-6 && e1 < 0.5) eps1_fine.push_back(e1);
        }
        const std::vector<double> fracs_fine = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        for (double df : delta_fracs) {
            const double delta = df * dmax;
            if (!(std::abs(p.rho) < rho_bound(delta))) continue;
            for (double nu : nu_fine)
                for (double mu : mu_fine)
                    scan_windows(p, opts.a, delta, nu, mu, eps1_fine, fracs_fine,
                                 opts.slack_margin, state);
        }
    }

    outcome.found = state.found;
    if (state.found) {
        outcome.best = state.best;
    } else {
        outcome.tightest_constraint = state.fail_constraint;
        outcome.tightest_slack = state.fail_best_slack;
    }
    return outcome;
}

} // namespace hestonvar
