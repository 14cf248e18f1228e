#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hestonvar/cli.hpp"
#include "hestonvar/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weighted variational Heston pricer"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")->required();
        cmd->add_option("--set", overrides, "dotted-path override, e.g. model.kappa=2.5");
        cmd->add_option("--out", out_dir, "output directory (defaults to config 'outputs')");
    };
    CLI::App* feas = app.add_subcommand("feasibility", "certify the coercivity constants");
    CLI::App* price = app.add_subcommand("price", "solve the PDE and compare with oracles");
    CLI::App* conv = app.add_subcommand("convergence", "grid/time/truncation sweeps");
    CLI::App* mccmp = app.add_subcommand("mc-compare", "Monte Carlo vs semi-analytic price");
    for (CLI::App* cmd : {feas, price, conv, mccmp}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hestonvar::kExitConfig;
    }

    try {
        const hestonvar::RunConfig cfg = hestonvar::load_config(config_path, overrides);
        const std::string dir = out_dir.empty() ? cfg.outputs : out_dir;
        if (feas->parsed()) return hestonvar::cmd_feasibility(cfg, dir);
        if (price->parsed()) return hestonvar::cmd_price(cfg, dir);
        if (conv->parsed()) return hestonvar::cmd_convergence(cfg, dir);
        if (mccmp->parsed()) return hestonvar::cmd_mc_compare(cfg, dir);
    } catch (const hestonvar::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return hestonvar::kExitConfig;
    } catch (const hestonvar::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return hestonvar::kExitInfeasible;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return hestonvar::kExitNumerical;
    }
    return hestonvar::kExitConfig;
}
