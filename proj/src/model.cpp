#include "hestonvar/model.hpp"

#include <algorithm>
#include <cmath>

#include "hestonvar/errors.hpp"

namespace hestonvar {

void HestonParams::validate() const {
    if (!(kappa > 0.0)) throw Error("HestonParams: kappa must be positive");
    if (!(m > 0.0)) throw Error("HestonParams: m must be positive");
    if (!(sigma > 0.0)) throw Error("HestonParams: sigma must be positive");
    if (!(r >= 0.0)) throw Error("HestonParams: r must be nonnegative");
    if (!(std::abs(rho) <= 1.0)) throw Error("HestonParams: |rho| must not exceed 1");
}

void OptionSpec::validate() const {
    if (!(strike > 0.0)) throw Error("OptionSpec: strike must be positive");
    if (!(maturity > 0.0)) throw Error("OptionSpec: maturity must be positive");
}

OptionKind option_kind_from_string(const std::string& s) {
    if (s == "call") return OptionKind::call;
    if (s == "put") return OptionKind::put;
    throw ConfigError("unknown option kind: " + s);
}

std::string to_string(OptionKind kind) {
    return kind == OptionKind::call ? "call" : "put";
}

double feller_margin(const HestonParams& p) {
    return p.kappa * p.m - 0.5 * p.sigma * p.sigma;
}

double bessel_dimension(const HestonParams& p) {
    return 4.0 * p.kappa * p.m / (p.sigma * p.sigma);
}

double payoff(const OptionSpec& spec, double S) {
    if (!(S >= 0.0)) throw Error("payoff: S must be nonnegative");
    const double intrinsic =
        spec.kind == OptionKind::call ? S - spec.strike : spec.strike - S;
    return std::max(intrinsic, 0.0);
}

double recover_price(double u_value, double t, double S, double y,
                     const OptionSpec& spec, const HestonParams& p, double omega) {
    if (!(S > 0.0)) throw Error("recover_price: S must be positive");
    const double tau = spec.maturity - t; // remaining calendar time
    const double discount = std::exp(-p.r * tau);
    const double forward_payoff = discount * payoff(spec, S * std::exp(p.r * tau));
    return std::exp(0.5 * omega * y * y) * u_value + forward_payoff;
}

} // namespace hestonvar
