// integral.hpp
//
// Archimedean quantities for the scaled system F over the unit boxes
// B1 x B2 (the P1, P2 fields of BoxPair are ignored here):
//
//   I(u)     = int_{B1 x B2} e(u . F(v; w)) dv dw
//   J(Phi)   = int_{[-Phi, Phi]^R} I(beta) dbeta
//   psi(z)   = max(0, 1 - |z|),  psi_T(z) = T psi(T z)
//   Jt_T     = int_{B1 x B2} prod_i psi_T(F_i(xi)) dxi
//
// Jt_T tends to J as T grows; the two routes are computed independently.

#pragma once

#include "bihom/counting.hpp"
#include "bihom/expsum.hpp"
#include "bihom/forms.hpp"
#include "bihom/quadrature.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bihom {

struct QuadratureSpec {
  // Gauss-Legendre nodes per axis and cell.
  int order = 8;
  // Extra dyadic refinement on top of the phase rule: an axis of length L
  // with sup |d(u.F)/dv_j| = D gets max(1, ceil(L D)) * 2^level cells, so
  // the phase moves by at most one period per cell.
  int level = 0;
  double tolerance = 1e-6;
  // Maximum number of integrand evaluations per I(u).
  double budget = 5e8;

  void validate() const;
};

struct OscillatoryResult {
  Complex value;
  double error = 0;  // |I_{level+1} - I_level|
  std::size_t evals = 0;
  bool converged = false;
};

// Fibers over a linear block analytically when the system has one.
OscillatoryResult oscillatory_I(const FormSystem& sys, std::span<const double> u,
                                const BoxPair& boxes, const QuadratureSpec& spec = {});

struct SingularIntegral {
  double phi = 0;
  double value = 0;  // real part
  double imag = 0;   // health check: should vanish
  double error = 0;
  std::size_t evals = 0;
  bool converged = false;
  bool real_ok = false;  // |imag| <= 10 * tolerance
};

// J(Phi) by gk15 panels over [-Phi, Phi]^R (R <= 2). Panels are no wider
// than 1 / max|F| so I(beta) moves by at most one period per panel.
SingularIntegral singular_integral_partial(const FormSystem& sys, double phi,
                                           const BoxPair& boxes, const QuadratureSpec& spec = {});

double psi(double z);
double psi_T(double z, double T);

struct SchmidtOptions {
  double abs_tol = 1e-6;
  double rel_tol = 1e-5;
  std::size_t max_evals = 40000000;
};

struct SchmidtValue {
  double T = 0;
  double value = 0;
  double error = 0;
  std::size_t evals = 0;
  bool converged = false;
};

// Jt_T for a single T > 0.
SchmidtValue schmidt_J_T(const FormSystem& sys, double T, const BoxPair& boxes,
                         const SchmidtOptions& opts = {});

struct SchmidtResult {
  std::vector<SchmidtValue> levels;  // T/4, T/2, T
  double value = 0;                  // extrapolated
  double error = 0;
  double ratio = 0;  // (J1 - J2) / (J2 - J4)
  bool converged = false;
  bool degenerate = false;
  std::string note;
};

// Richardson extrapolation over T/4, T/2, T. If the successive
// differences do not shrink the largest-T value is returned and the result
// is flagged degenerate.
SchmidtResult schmidt_J(const FormSystem& sys, double T, const BoxPair& boxes,
                        const SchmidtOptions& opts = {});

struct RealWitness {
  RealVector x, y;
  std::vector<double> residuals;        // scaled forms at (x, y)
  std::vector<double> singular_values;  // of the R x (n1 + n2) Jacobian
  int rank = 0;
};

struct RealZeroOptions {
  int starts = 256;
  std::uint64_t seed = 20240101;
  int max_iter = 60;
  double residual = 1e-10;
  double sv_floor = 1e-6;
};

// Damped Newton on random R-dimensional affine slices through Halton
// start points; returns the first validated witness.
std::optional<RealWitness> find_nonsingular_real_zero(const FormSystem& sys, const BoxPair& boxes,
                                                      const RealZeroOptions& opts = {});

// Recomputes residuals, singular values and rank of `w` and checks the
// residual, rank and strict-interiority conditions.
bool validate_real_witness(const FormSystem& sys, const BoxPair& boxes, RealWitness& w,
                           const RealZeroOptions& opts = {});

}  // namespace bihom
