#include "hestonvar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

#include "hestonvar/errors.hpp"
#include "hestonvar/quadrature.hpp"

namespace hestonvar {

void MCConfig::validate() const {
    if (paths < 1) throw Error("MCConfig: need at least one path");
    if (steps < 1) throw Error("MCConfig: need at least one step");
    if (scheme != "full-truncation-euler")
        throw ConfigError("MCConfig: unknown scheme '" + scheme + "'");
}

namespace {

using cplx = std::complex<double>;

// Characteristic function E[exp(i z ln S_T)] under the risk-neutral
// dynamics. Written with the (xi - d) branch so that the principal
// logarithm stays continuous in maturity.
cplx heston_cf(cplx z, const HestonParams& p, double T, double S0, double y0) {
    const cplx i(0.0, 1.0);
    const double s = p.sigma, s2 = s * s;
    const cplx xi = p.kappa - p.rho * s * i * z;
    const cplx d = std::sqrt(xi * xi + s2 * (i * z + z * z));
    const cplx g = (xi - d) / (xi + d);
    const cplx edt = std::exp(-d * T);
    const cplx D = (xi - d) / s2 * (1.0 - edt) / (1.0 - g * edt);
    const cplx C = p.kappa * p.m / s2 *
                   ((xi - d) * T - 2.0 * std::log((1.0 - g * edt) / (1.0 - g)));
    return std::exp(i * z * (std::log(S0) + p.r * T) + C + D * y0);
}

// Integrates the Fourier probability integrand over [0, inf) in fixed
// blocks until the tail is negligible.
double fourier_probability(const std::function<double(double)>& integrand) {
    double total = 0.0;
    int quiet_blocks = 0;
    const double block = 8.0;
    for (int k = 0; k < 500; ++k) {
        const double lo = k * block, hi = lo + block;
        const double piece = integrate_adaptive(integrand, lo, hi, 1e-12, 1e-10);
        total += piece;
        if (std::abs(piece) < 1e-13 * std::max(1.0, std::abs(total))) {
            if (++quiet_blocks >= 2) return 0.5 + total / M_PI;
        } else {
            quiet_blocks = 0;
        }
    }
    throw NumericalError("heston_price: Fourier integral did not converge");
}

} // namespace

double heston_price(const HestonParams& p, const OptionSpec& spec, double S0, double y0) {
    p.validate();
    spec.validate();
    if (!(S0 > 0.0)) throw Error("heston_price: S0 must be positive");
    if (!(y0 >= 0.0)) throw Error("heston_price: y0 must be nonnegative");

    const double T = spec.maturity, K = spec.strike, lnK = std::log(K);
    const cplx i(0.0, 1.0);
    const cplx cf_mi = heston_cf(cplx(0.0, -1.0), p, T, S0, y0); // equals S0 e^{rT}

    auto integrand2 = [&](double u) {
        const cplx val = std::exp(-i * u * lnK) * heston_cf(cplx(u, 0.0), p, T, S0, y0) /
                         (i * u);
        return val.real();
    };
    auto integrand1 = [&](double u) {
        const cplx val = std::exp(-i * u * lnK) * heston_cf(cplx(u, -1.0), p, T, S0, y0) /
                         (i * u * cf_mi);
        return val.real();
    };
    const double P1 = fourier_probability(integrand1);
    const double P2 = fourier_probability(integrand2);
    const double call = S0 * P1 - K * std::exp(-p.r * T) * P2;
    if (spec.kind == OptionKind::call) return call;
    return call - S0 + K * std::exp(-p.r * T); // put by parity
}

double black_scholes_price(const OptionSpec& spec, double S0, double vol, double r) {
    const double T = spec.maturity, K = spec.strike;
    auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double sq = vol * std::sqrt(T);
    const double d1 = (std::log(S0 / K) + (r + 0.5 * vol * vol) * T) / sq;
    const double call = S0 * Phi(d1) - K * std::exp(-r * T) * Phi(d1 - sq);
    if (spec.kind == OptionKind::call) return call;
    return call - S0 + K * std::exp(-r * T);
}

int worker_count() {
    if (const char* env = std::getenv("HESTONVAR_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct PathEndpoint {
    double s_T;
    double y_T;
};

// One full-truncation Euler path with its own counter-derived substream;
// the result depends only on (seed, path index, model, grid).
PathEndpoint simulate_path(const HestonParams& p, double S0, double y0, double T,
                           const MCConfig& cfg, long path) {
    std::mt19937_64 gen(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(path))));
    std::normal_distribution<double> normal;
    const double dt = T / cfg.steps;
    const double sq_dt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);
    double x = std::log(S0);
    double y = y0;
    for (int n = 0; n < cfg.steps; ++n) {
        const double z1 = normal(gen);
        const double z2 = normal(gen);
        const double zs = z1;                          // asset shock
        const double zy = p.rho * z1 + rho_c * z2;     // variance shock
        const double yp = std::max(y, 0.0);
        const double vol = std::sqrt(yp);
        x += (p.r - 0.5 * yp) * dt + vol * sq_dt * zs;
        y += p.kappa * (p.m - yp) * dt + p.sigma * vol * sq_dt * zy;
    }
    return {std::exp(x), y};
}

struct BlockSums {
    double payoff = 0.0, payoff2 = 0.0;
    double s = 0.0, s2 = 0.0;
    double y = 0.0, y2 = 0.0;
};

// Fixed-size blocks accumulated in block order, so the reduction is
// independent of how blocks are assigned to workers.
std::vector<BlockSums> run_blocks(const HestonParams& p, const OptionSpec* spec, double S0,
                                  double y0, double T, const MCConfig& cfg) {
    constexpr long kBlock = 4096;
    const long nblocks = (cfg.paths + kBlock - 1) / kBlock;
    std::vector<BlockSums> sums(nblocks);

    auto work = [&](long b0, long b1) {
        for (long b = b0; b < b1; ++b) {
            BlockSums acc;
            const long lo = b * kBlock, hi = std::min(cfg.paths, lo + kBlock);
            for (long path = lo; path < hi; ++path) {
                const PathEndpoint ep = simulate_path(p, S0, y0, T, cfg, path);
                if (spec) {
                    const double pay = std::exp(-p.r * T) * payoff(*spec, ep.s_T);
                    acc.payoff += pay;
                    acc.payoff2 += pay * pay;
                }
                acc.s += ep.s_T;
                acc.s2 += ep.s_T * ep.s_T;
                acc.y += ep.y_T;
                acc.y2 += ep.y_T * ep.y_T;
            }
            sums[b] = acc;
        }
    };

    const int workers = std::min<long>(worker_count(), nblocks);
    if (workers <= 1) {
        work(0, nblocks);
    } else {
        std::vector<std::thread> pool;
        const long per = (nblocks + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long b0 = w * per, b1 = std::min(nblocks, b0 + per);
            if (b0 < b1) pool.emplace_back(work, b0, b1);
        }
        for (auto& th : pool) th.join();
    }
    return sums;
}

struct MeanSe {
    double mean, se;
};

MeanSe reduce(const std::vector<BlockSums>& sums, double BlockSums::* first,
              double BlockSums::* second, long n) {
    double s1 = 0.0, s2 = 0.0;
    for (const auto& b : sums) {
        s1 += b.*first;
        s2 += b.*second;
    }
    const double mean = s1 / n;
    const double var = std::max(0.0, s2 / n - mean * mean);
    const double se = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    return {mean, se};
}

} // namespace

MCResult mc_price(const HestonParams& p, const OptionSpec& spec, double S0, double y0,
                  const MCConfig& cfg) {
    p.validate();
    spec.validate();
    cfg.validate();
    const auto sums = run_blocks(p, &spec, S0, y0, spec.maturity, cfg);
    const MeanSe ms = reduce(sums, &BlockSums::payoff, &BlockSums::payoff2, cfg.paths);
    return {ms.mean, ms.se};
}

TerminalMoments mc_terminal_moments(const HestonParams& p, double S0, double y0, double T,
                                    const MCConfig& cfg) {
    p.validate();
    cfg.validate();
    const auto sums = run_blocks(p, nullptr, S0, y0, T, cfg);
    const MeanSe s = reduce(sums, &BlockSums::s, &BlockSums::s2, cfg.paths);
    const MeanSe y = reduce(sums, &BlockSums::y, &BlockSums::y2, cfg.paths);
    return {s.mean, s.se, y.mean, y.se};
}

} // namespace hestonvar
