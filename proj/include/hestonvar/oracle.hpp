#pragma once

#include <cstdint>
#include <string>

#include "hestonvar/model.hpp"

namespace hestonvar {

struct MCConfig {
    long paths = 100000;
    int steps = 256;
    std::uint64_t seed = 20240101;
    std::string scheme = "full-truncation-euler";

    void validate() const;
};

// Semi-analytic European price by Fourier integration of the Heston
// characteristic function (risk-neutral drift r, principal-branch
// continuous-phase formulation). Quadrature targets 1e-8 absolute error
// and throws NumericalError on non-convergence.
double heston_price(const HestonParams& p, const OptionSpec& spec, double S0, double y0);

struct MCResult {
    double price = 0.0;
    double std_error = 0.0;
};

// Full-truncation Euler Monte Carlo under the risk-neutral measure:
// Y+ = max(Y, 0) enters drift and diffusion, the asset evolves in log
// space, normals are correlated through the Cholesky factor of
// [[1, rho], [rho, 1]]. Deterministic for a fixed seed and config,
// independent of the worker count.
MCResult mc_price(const HestonParams& p, const OptionSpec& spec, double S0, double y0,
                  const MCConfig& cfg);

struct TerminalMoments {
    double mean_s = 0.0;
    double se_s = 0.0;
    double mean_y = 0.0;
    double se_y = 0.0;
};

// Sample moments of (S_T, Y_T) under the same scheme and substreams as
// mc_price.
TerminalMoments mc_terminal_moments(const HestonParams& p, double S0, double y0, double T,
                                    const MCConfig& cfg);

// Black-Scholes reference price at a flat volatility.
double black_scholes_price(const OptionSpec& spec, double S0, double vol, double r);

// Worker count used by path-parallel loops: HESTONVAR_THREADS when set,
// otherwise the hardware concurrency.
int worker_count();

} // namespace hestonvar
