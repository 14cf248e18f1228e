#pragma once

#include <optional>
#include <string>

#include "hestonvar/config.hpp"

namespace hestonvar {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitConfig = 4;

struct CertificateOutcome {
    std::optional<CoercivityCertificate> cert; // present when certified
    CoercivityCertificate report;              // last constraint report (certify path)
    bool from_search = false;
    std::string failure; // tightest failing constraint when infeasible
};

// Certify the configured variational block, or search when it is absent.
CertificateOutcome obtain_certificate(const RunConfig& cfg);

// Commands return one of the exit codes above; serious failures propagate
// as exceptions and are mapped by the front end.
int cmd_feasibility(const RunConfig& cfg, const std::string& out_dir);
int cmd_price(const RunConfig& cfg, const std::string& out_dir);
int cmd_convergence(const RunConfig& cfg, const std::string& out_dir);
int cmd_mc_compare(const RunConfig& cfg, const std::string& out_dir);

} // namespace hestonvar
