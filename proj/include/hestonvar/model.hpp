#pragma once

#include <string>

namespace hestonvar {

// Heston model constants. eta is the physical drift of the asset; it is
// carried along for reporting but pricing always uses the risk-neutral
// rate r.
struct HestonParams {
    double kappa = 0.0; // rate of mean reversion (1/time)
    double m = 0.0;     // long-run variance level
    double sigma = 0.0; // volatility of volatility
    double rho = 0.0;   // instantaneous correlation, |rho| <= 1
    double r = 0.0;     // risk-free rate (1/time)
    double eta = 0.0;   // physical drift, metadata only

    void validate() const; // throws Error on violated invariants
};

enum class OptionKind { call, put };

struct OptionSpec {
    double strike = 1.0;   // K > 0
    double maturity = 1.0; // T > 0
    OptionKind kind = OptionKind::call;

    void validate() const;
};

OptionKind option_kind_from_string(const std::string& s);
std::string to_string(OptionKind kind);

// kappa*m - sigma^2/2. The model is admissible iff this is strictly
// positive; the variance process then stays strictly positive.
double feller_margin(const HestonParams& p);

// Dimension 4*kappa*m/sigma^2 of the squared Bessel process obtained
// from the variance by a space-time change. Exceeds 2 exactly when the
// Feller margin is positive.
double bessel_dimension(const HestonParams& p);

// Terminal payoff h(S): (S-K)+ for a call, (K-S)+ for a put.
double payoff(const OptionSpec& spec, double S);

// Inverts the forward transform chain. u_value is the forward solution
// at forward time T-t, log-price x = ln S and variance y; the returned
// price is
//   U(t,S,y) = exp((omega/2) y^2) * u_value + exp(-r(T-t)) h(S e^{r(T-t)}).
double recover_price(double u_value, double t, double S, double y,
                     const OptionSpec& spec, const HestonParams& p, double omega);

} // namespace hestonvar
