#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hestonvar/coercivity.hpp"
#include "hestonvar/model.hpp"
#include "hestonvar/wspace.hpp"

namespace hestonvar {

// Primitive integrals of the integrated-by-parts form, split by the model
// coefficient they carry so that coefficient-deletion tests can address
// them individually. The ten groups of the expansion map to:
//   1 -> XX, 2 -> X_PHI, 3 -> YY, 4 -> Y_CONST, 5 -> Y_MU, 6 -> Y_PHI,
//   7 -> YX, 8 -> {X_OMEGA_RHO, X_HALF_Y, X_RATE},
//   9 -> {Y_OMEGA, Y_KM, Y_KY}, 10 -> {ZERO_* , ZERO_RATE}.
enum FormTerm : std::uint32_t {
    kTermXX = 1u << 0,        // +(1/2) y du/dx dv/dx
    kTermXPhi = 1u << 1,      // +nu sign(x) y du/dx v
    kTermYY = 1u << 2,        // +(s^2/2) y du/dy dv/dy
    kTermYConst = 1u << 3,    // +(s^2/2) du/dy v
    kTermYMu = 1u << 4,       // +mu s^2 y^2 du/dy v
    kTermYPhi = 1u << 5,      // +2 rho s nu sign(x) y du/dy v
    kTermYX = 1u << 6,        // +rho s y du/dy dv/dx
    kTermXOmegaRho = 1u << 7, // -omega rho s y^2 du/dx v
    kTermXHalfY = 1u << 8,    // +(1/2) y du/dx v
    kTermXRate = 1u << 9,     // -r du/dx v
    kTermYOmega = 1u << 10,   // -omega s^2 y^2 du/dy v
    kTermYKm = 1u << 11,      // -kappa m du/dy v
    kTermYKy = 1u << 12,      // +kappa y du/dy v
    kTermZeroOmega2 = 1u << 13, // -(1/2) omega^2 s^2 y^3 u v
    kTermZeroOmegaS = 1u << 14, // -(1/2) omega s^2 y u v
    kTermZeroOmegaKm = 1u << 15, // -omega kappa m y u v
    kTermZeroOmegaK = 1u << 16,  // +omega kappa y^2 u v
    kTermZeroRate = 1u << 17,    // +r u v
};

constexpr std::uint32_t kAllTerms = (1u << 18) - 1u;

// Terms that vanish when the named model coefficient is zero.
constexpr std::uint32_t kRhoTerms = kTermYPhi | kTermYX | kTermXOmegaRho;
constexpr std::uint32_t kRateTerms = kTermXRate | kTermZeroRate;
constexpr std::uint32_t kKappaTerms =
    kTermYKm | kTermYKy | kTermZeroOmegaKm | kTermZeroOmegaK;
constexpr std::uint32_t kOmegaTerms = kTermXOmegaRho | kTermYOmega | kTermZeroOmega2 |
                                      kTermZeroOmegaS | kTermZeroOmegaKm | kTermZeroOmegaK;

// Stiffness-like matrix A with A(i,j) = a_H(basis_j, basis_i) and the
// weighted mass matrix, both on the interior nodes.
struct FormMatrices {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
};

FormMatrices assemble(const TruncatedDomain& dom, const QuadratureRule& quad,
                      const HestonParams& p, const VariationalParams& vp,
                      std::uint32_t terms = kAllTerms);

// Load vector of the Dirac line source at forward time t: entries
//   (K/2) e^{-rt} phi^2(x*) int_a^{ymax} y e^{-(omega/2)y^2} basis_i(x*,y) psi^2(y) dy
// with x* = ln K - r t; the zero vector when x* leaves the truncated domain.
Eigen::VectorXd dirac_source(double t, const TruncatedDomain& dom, const QuadratureRule& quad,
                             const HestonParams& p, const VariationalParams& vp,
                             const OptionSpec& spec);

// Smooth function handle with the first partial derivatives needed by the
// identity checks.
struct SmoothField {
    std::function<double(double, double)> f;
    std::function<double(double, double)> fy;
};

struct IbpResiduals {
    double first = 0.0;  // y-moment identity
    double second = 0.0; // y^2-moment identity
    double third = 0.0;  // y^3-moment identity
};

// Relative residuals of the three integration-by-parts moment identities
// for psi' = mu y psi, computed by quadrature on the truncated domain.
IbpResiduals check_ibp_identities(const SmoothField& u, const SmoothField& v,
                                  const TruncatedDomain& dom, const QuadratureRule& quad,
                                  double nu, double mu);

// Re(v' A v) - c1 ||v||_V^2 - c2 ||v||^2 for a certified constant pair;
// nonnegative up to quadrature error for every discrete v.
double garding_residual(const DiscreteFunction& v, const FormMatrices& fm,
                        const CoercivityCertificate& cert, const TruncatedDomain& dom,
                        const QuadratureRule& quad);

// |a(u,v)| / (||u||_V ||v||_V); rejects zero arguments.
double continuity_ratio(const DiscreteFunction& u, const DiscreteFunction& v,
                        const FormMatrices& fm, const TruncatedDomain& dom,
                        const QuadratureRule& quad, const VariationalParams& vp);

// Explicit continuity constant assembled from the per-term bounds
// (factors 1, 1/sqrt(a), 1/(a mu), 1/mu against coefficient magnitudes).
double continuity_bound(const HestonParams& p, const VariationalParams& vp);

} // namespace hestonvar
