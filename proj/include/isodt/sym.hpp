#pragma once

#include <functional>
#include <string>

#include "isodt/connection.hpp"
#include "isodt/cylinder.hpp"
#include "isodt/darboux.hpp"

namespace isodt {

/// Smooth family lambda -> d_lambda-parallel field through phi1 at
/// lambda = rho. The extension rule is recorded because the Sym section
/// depends on it.
class LambdaFamily {
  public:
    enum class Rule { FrozenSeed, Oracle };

    LambdaFamily(Rule rule, double rho, std::function<SectionField(double)> eval)
        : rule_(rule), rho_(rho), eval_(std::move(eval)) {}

    SectionField eval(double lambda) const { return eval_(lambda); }
    Rule rule() const { return rule_; }
    double rho() const { return rho_; }
    std::string rule_name() const { return rule_ == Rule::FrozenSeed ? "frozen-seed" : "oracle"; }

  private:
    Rule rule_;
    double rho_;
    std::function<SectionField(double)> eval_;
};

/// FrozenSeed: phi^lambda is the d_lambda-parallel field with
/// phi^lambda(x0, 0) = phi1(x0, 0) for every lambda. Oracle: closed-form
/// extension with fixed branch coefficients and lambda-dependent t
/// (cylinder-backed families only; oracle_params must reproduce phi1).
LambdaFamily extend_section(const ConnectionFamily& fam, const SectionField& phi1, double rho,
                            LambdaFamily::Rule rule,
                            const cyl::SectionParams* oracle_params = nullptr);

inline double default_lambda_eps(double rho) { return 1e-4 * std::max(1.0, std::abs(rho)); }

/// d/d lambda at rho by the 4-point stencil
/// (phi^{r-2e} - 8 phi^{r-e} + 8 phi^{r+e} - phi^{r+2e})/(12 e);
/// throws when the 2-point stencils disagree so badly that roundoff
/// dominates (epsilon too small).
SectionField lambda_derivative(const LambdaFamily& family, double rho, double eps = 0);

/// Sym-type section phi11 = phi1 - rho * pi(phi1dot), pi the projection
/// onto L along L1 = phi1 H. pi1(phi11) = phi1 by construction.
SectionField sym_section(const SectionField& phi1, const SectionField& phi1dot,
                         const SurfaceGrid& f, double rho);

/// Transform of f1 generated by a d^1_rho-parallel section, in the affine
/// chart. returns_original marks the Bianchi-type degenerate case.
DarbouxResult sym_two_step(const DarbouxResult& f1, const SectionField& phi11);

/// phi-hat = phi11 m1 + phi12 m2; spans all transforms of f1 at rho.
SectionField general_two_step(const SectionField& phi11, const SectionField& phi12,
                              const Quat& m1, const Quat& m2);

/// Solves phi_target = phi11 m1 + phi12 m2 at one sample and reports the
/// worst relative reconstruction defect over the whole grid.
struct Decomposition {
    Quat m1, m2;
    double residual = 0;
};
Decomposition decompose_parallel_section(const SectionField& target, const SectionField& phi11,
                                         const SectionField& phi12, int ix = 0, int iy = 0);

/// Empirical check that the multipliers of the family interpolate h1 to
/// O(eps^2) around rho; returns the defect (closedness is "unverified"
/// when it is large).
double multiplier_smoothness_defect(const ConnectionFamily& fam, double rho, Complex h1,
                                    double eps, double x = 0.0);

}  // namespace isodt
