#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hestonvar/model.hpp"

namespace hestonvar {

// Weight/transform exponents of the variational setting: phi = exp(nu|x|),
// psi = exp(mu y^2/2), transform factor exp(-omega y^2/2), variance cutoff a.
struct VariationalParams {
    double a = 1e-2;
    double nu = 1e-3;
    double mu = 0.5;
    double omega = 1.0;

    void validate() const; // a, nu, mu > 0 and omega > mu
};

struct EpsilonTriple {
    double eps1 = 0.1;
    double eps2 = 0.5;
    double eps3 = 1.0;

    void validate() const; // all strictly positive
};

// Derived constants of the certificate. c is the ratio 2*beta/(mu sigma^2)
// entering the gate function g.
struct AuxConstants {
    double delta = 0.0;
    double tbar = 0.0;  // 1 + 1/sqrt(1+delta)
    double tau = 0.0;   // 1 - rho^2/eps2
    double gamma = 0.0; // 2 tau / tbar - 1
    double beta = 0.0;  // nu^2/(2 eps1) + nu/2
    double c = 0.0;     // 2 beta / (mu sigma^2)
};

struct AlphaCoefficients {
    double alpha1 = 0.0; // (1 - eps1 - eps2)/2
    double alpha2 = 0.0; // (sigma^2/2)(1 - rho^2/eps2)
    double alpha3 = 0.0; // -r nu - kappa/2 - rho sigma nu + r
    double alpha4 = 0.0; // omega kappa - kappa mu - omega rho sigma nu - 2 rho sigma nu mu
    double alpha5 = 0.0; // omega(km - s^2/2) + s^2 mu + beta - (km - s^2/2) mu
    double alpha6 = 0.0; // mu alpha5 + omega mu s^2 - s^2 mu^2 - omega^2 s^2/2
};

struct ConstraintCheck {
    std::string id;
    bool satisfied = false;
    double slack = 0.0; // positive means satisfied with that margin
};

struct CoercivityCertificate {
    HestonParams model;
    VariationalParams vp;
    EpsilonTriple eps;
    double delta = 0.0;
    AlphaCoefficients alphas;
    AuxConstants aux;
    double omega_lo = 0.0; // M of the admissible omega interval
    double omega_hi = 0.0; // N of the admissible omega interval
    double delta_omega = 0.0;
    bool certified = false;
    double c1 = 0.0; // defined only when certified
    double c2 = 0.0; // defined only when certified, equals alpha3
    std::vector<ConstraintCheck> constraints;

    // Flat snake_case document; doubles rendered as decimal strings.
    std::string to_json() const;
};

// Supremum of admissible Feller slack: ((kappa m - sigma^2/2)/sigma^2)^2.
// Any delta strictly inside (0, delta_max) is usable. Throws
// InfeasibleError when the Feller margin is not positive.
double delta_max(const HestonParams& p);

// Correlation window sqrt(1/2 - 1/(2 sqrt(1+delta))); certification
// requires |rho| strictly below this.
double rho_bound(double delta);

AuxConstants aux_constants(const HestonParams& p, const VariationalParams& vp,
                           const EpsilonTriple& eps, double delta);

AlphaCoefficients alpha_coefficients(const HestonParams& p, const VariationalParams& vp,
                                     const EpsilonTriple& eps, const AuxConstants& aux);

// Upper bound on nu that makes alpha4 nonnegative when 0 < rho < 1:
// kappa(omega - mu) / (rho sigma (omega + 2 mu)). For rho <= 0 the
// constraint does not apply and nullopt ("unbounded") is returned.
std::optional<double> nu_bound(const HestonParams& p, const VariationalParams& vp);

struct GatingValues {
    double g = 0.0;       // ((2+c)t - (1+c)t^2) / (t-1)^2
    double f = 0.0;       // (t/(t-1)) (gamma - c/2)
    double f_tilde = 0.0; // (t/(t(1+2 gamma) - (2+2 gamma))) (gamma - c/2)^2
};

// Evaluates the three rational gate functions at t (normally t = 2 eps3 mu).
// Throws NumericalError on pole proximity.
GatingValues gating_functions(double t, const AuxConstants& aux);

struct OmegaInterval {
    double lo = 0.0;
    double hi = 0.0;
    double delta_omega = 0.0;
};

// Admissible omega interval (M, N): M = max(lower quadratic root, mu),
// N = min(upper quadratic root, mu + (gamma sigma^2 mu - beta)/(km - s^2/2)).
// delta_omega is the quadratic discriminant; lo >= hi or delta_omega < 0
// signal infeasibility (certify reports it; no throw here).
OmegaInterval omega_interval(const HestonParams& p, const VariationalParams& vp,
                             const EpsilonTriple& eps, const AuxConstants& aux,
                             const AlphaCoefficients& alphas);

struct Window {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
};

// Admissible eps3 window
//   ( tbar/(2 mu), min{ 2 alpha2/alpha5, (1/(2 mu))(1 + 1/(1+2 gamma)) } ).
// Requires alpha5 > 0.
Window eps3_window(const AlphaCoefficients& alphas, const AuxConstants& aux,
                   const VariationalParams& vp);

// Evaluates every constraint of the coercivity statement and, if all hold,
// emits c1 = min{alpha1, alpha2 - alpha5 eps3/2, a^3 (alpha6 - alpha5/(2 eps3))}
// and c2 = alpha3. Open inequalities are enforced with the given slack
// margin. On failure the certificate carries the full constraint report
// and no constants.
CoercivityCertificate certify(const HestonParams& p, const VariationalParams& vp,
                              const EpsilonTriple& eps, double delta,
                              double slack_margin = 1e-10);

struct SearchOptions {
    double a = 1e-2;         // variance cutoff carried into certificates
    int nu_points = 32;      // log grid over [nu_min, nu_max]
    int mu_points = 32;
    double nu_min = 1e-4, nu_max = 10.0;
    double mu_min = 1e-4, mu_max = 10.0;
    double slack_margin = 1e-10;
};

struct SearchResult {
    VariationalParams vp;
    EpsilonTriple eps;
    double delta = 0.0;
    CoercivityCertificate cert;
};

struct SearchOutcome {
    bool found = false;
    SearchResult best;
    // When the search is exhausted: the constraint that came closest to
    // holding across all visited grid points.
    std::string tightest_constraint;
    double tightest_slack = 0.0;
};

// Deterministic coarse-to-fine grid search over (delta, eps1, eps2, eps3,
// nu, mu, omega) honoring all feasibility windows. Returns the first
// certificate (lexicographic grid order) maximizing c1.
SearchOutcome search_feasible(const HestonParams& p, const SearchOptions& opts = {});

} // namespace hestonvar
