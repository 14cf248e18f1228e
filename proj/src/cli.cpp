#include "hestonvar/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "hestonvar/detail/format.hpp"
#include "hestonvar/errors.hpp"
#include "hestonvar/form.hpp"
#include "hestonvar/oracle.hpp"
#include "hestonvar/solver.hpp"

namespace hestonvar {

namespace {

namespace fs = std::filesystem;
using detail::format_double;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "'");
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary); // binary: LF endings
    if (!out) throw ConfigError("cannot write to '" + dir + "/" + name + "'");
    return out;
}

void print_constraint_table(const CoercivityCertificate& cert) {
    std::printf("%-22s %-10s %s\n", "constraint", "satisfied", "slack");
    for (const auto& ck : cert.constraints)
        std::printf("%-22s %-10s %s\n", ck.id.c_str(), ck.satisfied ? "yes" : "NO",
                    format_double(ck.slack).c_str());
    if (cert.certified)
        std::printf("certified: c1 = %s, c2 = %s\n", format_double(cert.c1).c_str(),
                    format_double(cert.c2).c_str());
}

std::string tightest_failure(const CoercivityCertificate& cert) {
    std::string id = "none";
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& ck : cert.constraints)
        if (!ck.satisfied && ck.slack > best) {
            best = ck.slack;
            id = ck.id;
        }
    return id;
}

// Internal pricing setup with the spot normalized to 1.
struct PricingRun {
    OptionSpec scaled_spec;
    FormMatrices fm;
    QuadratureRule quad;
    SolveResult sr;
};

PricingRun run_pde(const RunConfig& cfg, const VariationalParams& vp) {
    PricingRun run;
    run.scaled_spec = cfg.option;
    run.scaled_spec.strike = cfg.option.strike / cfg.s0;
    run.quad = QuadratureRule::make(cfg.quad_order);
    run.fm = assemble(cfg.domain, run.quad, cfg.model, vp);
    run.sr = solve(run.fm, cfg.domain, run.quad, cfg.model, vp, run.scaled_spec, cfg.time);
    return run;
}

double pde_price_at(const PricingRun& run, const RunConfig& cfg, const VariationalParams& vp,
                    OptionKind kind) {
    OptionSpec spec = run.scaled_spec;
    spec.kind = kind;
    const PriceSurface ps =
        price_surface(run.sr, cfg.domain, cfg.model, vp, spec, {1.0}, {cfg.y0});
    if (!ps.out_of_range.empty())
        throw NumericalError("price evaluation point left the truncated domain");
    return cfg.s0 * ps.values(0, 0);
}

void write_norms_csv(const std::string& dir, const SolveResult& sr) {
    auto out = open_out(dir, "norms.csv");
    out << "t,l2_norm\n";
    for (std::size_t n = 0; n < sr.times.size(); ++n)
        out << format_double(sr.times[n]) << "," << format_double(sr.l2_norm_history[n])
            << "\n";
}

void write_surface_csv(const std::string& dir, const RunConfig& cfg,
                       const VariationalParams& vp, const PricingRun& run) {
    std::vector<double> s_grid, y_grid;
    for (int ix = 1; ix <= cfg.domain.nx - 1; ++ix)
        s_grid.push_back(cfg.s0 * std::exp(cfg.domain.x(ix)));
    for (int iy = 1; iy <= cfg.domain.ny - 1; ++iy) y_grid.push_back(cfg.domain.y(iy));
    const PriceSurface ps =
        price_surface(run.sr, cfg.domain, cfg.model, vp, run.scaled_spec, s_grid, y_grid);
    auto out = open_out(dir, "surface.csv");
    out << "S,y,U\n";
    for (std::size_t i = 0; i < s_grid.size(); ++i)
        for (std::size_t j = 0; j < y_grid.size(); ++j)
            out << format_double(s_grid[i]) << "," << format_double(y_grid[j]) << ","
                << format_double(cfg.s0 * ps.values(static_cast<int>(i), static_cast<int>(j)))
                << "\n";
}

struct CompareRow {
    std::string method;
    double price, std_error, abs_diff;
};

void write_compare_csv(const std::string& dir, const std::vector<CompareRow>& rows) {
    auto out = open_out(dir, "compare.csv");
    out << "method,price,std_error,abs_diff_vs_analytic\n";
    for (const auto& row : rows)
        out << row.method << "," << format_double(row.price) << ","
            << format_double(row.std_error) << "," << format_double(row.abs_diff) << "\n";
}

} // namespace

CertificateOutcome obtain_certificate(const RunConfig& cfg) {
    CertificateOutcome outcome;
    if (cfg.variational) {
        const VariationalSpec& vs = *cfg.variational;
        const double delta = vs.delta ? *vs.delta
                                      : (feller_margin(cfg.model) > 0.0
                                             ? 0.5 * delta_max(cfg.model)
                                             : 0.0);
        CoercivityCertificate cert =
            certify(cfg.model, vs.vp, vs.eps, delta);
        outcome.report = cert;
        if (cert.certified)
            outcome.cert = std::move(cert);
        else
            outcome.failure = tightest_failure(outcome.report);
        return outcome;
    }
    SearchOptions opts;
    opts.a = cfg.domain.a;
    const SearchOutcome so = search_feasible(cfg.model, opts);
    outcome.from_search = true;
    if (so.found) {
        outcome.cert = so.best.cert;
        outcome.report = so.best.cert;
    } else {
        outcome.failure = so.tightest_constraint;
    }
    return outcome;
}

int cmd_feasibility(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const CertificateOutcome outcome = obtain_certificate(cfg);
    auto out = open_out(out_dir, "certificate.json");
    if (outcome.cert || !outcome.from_search) {
        const CoercivityCertificate& cert = outcome.cert ? *outcome.cert : outcome.report;
        out << cert.to_json() << "\n";
        print_constraint_table(cert);
    } else {
        out << "{\n  \"certified\": false,\n  \"tightest_constraint\": \"" << outcome.failure
            << "\"\n}\n";
    }
    if (outcome.cert) return kExitOk;
    std::printf("infeasible: tightest constraint '%s'\n", outcome.failure.c_str());
    return kExitInfeasible;
}

int cmd_price(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const CertificateOutcome outcome = obtain_certificate(cfg);
    if (!outcome.cert) {
        std::printf("infeasible: tightest constraint '%s'\n", outcome.failure.c_str());
        return kExitInfeasible;
    }
    const VariationalParams& vp = outcome.cert->vp;
    auto cert_out = open_out(out_dir, "certificate.json");
    cert_out << outcome.cert->to_json() << "\n";

    const PricingRun run = run_pde(cfg, vp);
    const double pde_call = pde_price_at(run, cfg, vp, OptionKind::call);
    const double pde_put = pde_price_at(run, cfg, vp, OptionKind::put);
    const double pde =
        cfg.option.kind == OptionKind::call ? pde_call : pde_put;
    const double analytic = heston_price(cfg.model, cfg.option, cfg.s0, cfg.y0);
    const MCResult mc = mc_price(cfg.model, cfg.option, cfg.s0, cfg.y0, cfg.mc);

    const double forward_gap =
        cfg.s0 - cfg.option.strike * std::exp(-cfg.model.r * cfg.option.maturity);
    const double parity_gap = (pde_call - pde_put) - forward_gap;

    write_compare_csv(out_dir,
                      {{"analytic", analytic, 0.0, 0.0},
                       {"pde", pde, 0.0, std::abs(pde - analytic)},
                       {"mc", mc.price, mc.std_error, std::abs(mc.price - analytic)},
                       {"pde-parity-gap", parity_gap, 0.0, std::abs(parity_gap)}});
    write_norms_csv(out_dir, run.sr);
    write_surface_csv(out_dir, cfg, vp, run);

    std::printf("analytic %.10f  pde %.10f  mc %.10f (se %.2e)  parity gap %.3e\n", analytic,
                pde, mc.price, mc.std_error, parity_gap);
    return kExitOk;
}

int cmd_convergence(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const CertificateOutcome outcome = obtain_certificate(cfg);
    if (!outcome.cert) {
        std::printf("infeasible: tightest constraint '%s'\n", outcome.failure.c_str());
        return kExitInfeasible;
    }
    const VariationalParams& vp = outcome.cert->vp;

    auto price_with = [&](const RunConfig& c) {
        const PricingRun run = run_pde(c, vp);
        return pde_price_at(run, c, vp, c.option.kind);
    };

    auto out = open_out(out_dir, "convergence.csv");
    out << "axis,level,setting,price,delta_vs_prev,observed_order\n";
    const std::vector<std::string> axes = {"nx", "ny", "nt", "y_max"};
    for (const auto& axis : axes) {
        double prev_price = 0.0, prev_delta = 0.0;
        for (int level = 0; level < 3; ++level) {
            RunConfig c = cfg;
            const int mult = 1 << level;
            double setting = 0.0;
            if (axis == "nx") setting = c.domain.nx *= mult;
            if (axis == "ny") setting = c.domain.ny *= mult;
            if (axis == "nt") setting = c.time.nt *= mult;
            if (axis == "y_max") {
                // extend the cutoff at a fixed cell size
                const double hy = c.domain.hy();
                c.domain.y_max = c.domain.a + (c.domain.y_max - c.domain.a) * mult;
                c.domain.ny = static_cast<int>(std::lround((c.domain.y_max - c.domain.a) / hy));
                setting = c.domain.y_max;
            }
            const double price = price_with(c);
            out << axis << "," << level << "," << format_double(setting) << ","
                << format_double(price);
            if (level > 0) {
                const double delta = std::abs(price - prev_price);
                out << "," << format_double(delta);
                if (level > 1 && delta > 0.0)
                    out << "," << format_double(std::log2(prev_delta / delta));
                else
                    out << ",";
                prev_delta = delta;
            } else {
                out << ",,";
            }
            out << "\n";
            prev_price = price;
        }
    }
    return kExitOk;
}

int cmd_mc_compare(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const double analytic = heston_price(cfg.model, cfg.option, cfg.s0, cfg.y0);
    const MCResult mc = mc_price(cfg.model, cfg.option, cfg.s0, cfg.y0, cfg.mc);
    write_compare_csv(out_dir, {{"analytic", analytic, 0.0, 0.0},
                                {"mc", mc.price, mc.std_error,
                                 std::abs(mc.price - analytic)}});
    std::printf("analytic %.10f  mc %.10f (se %.2e)\n", analytic, mc.price, mc.std_error);
    return kExitOk;
}

} // namespace hestonvar
