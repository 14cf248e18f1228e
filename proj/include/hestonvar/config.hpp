#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hestonvar/coercivity.hpp"
#include "hestonvar/model.hpp"
#include "hestonvar/oracle.hpp"
#include "hestonvar/solver.hpp"
#include "hestonvar/wspace.hpp"

namespace hestonvar {

// Explicit variational block; when absent the feasibility search supplies
// the parameters.
struct VariationalSpec {
    VariationalParams vp;
    EpsilonTriple eps;
    std::optional<double> delta; // default: delta_max / 2
};

struct RunConfig {
    HestonParams model;
    OptionSpec option;
    double s0 = 1.0;
    double y0 = 0.0;
    std::optional<VariationalSpec> variational;
    TruncatedDomain domain;
    TimeGrid time;
    MCConfig mc;
    int quad_order = 5;
    std::string outputs = "out";
};

// Parses a single JSON document (with optional dotted-path overrides
// applied first). Unknown keys are rejected; missing optional sections
// take the documented defaults. Throws ConfigError on malformed input.
RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides = {});

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

} // namespace hestonvar
