#pragma once

#include <complex>

#include "isodt/connection.hpp"
#include "isodt/quaternion.hpp"
#include "isodt/surface.hpp"

namespace isodt {
namespace cyl {

/// Closed-form reference data for the round cylinder
///     f(x, y) = (i x + j e^{-i y}) / 2,
/// dual f^d = -2 (i x - j e^{-i y}), mean curvatures H = 1, H^d = -1/4.
///
/// The dual is normalised as df^d = f_x^{-1} dx - f_y^{-1} dy. This pins
/// the spectral-parameter scale of the whole module: the branch point of
/// the multiplier spectrum sits at rho_0 = -1/4 and the resonance points
/// at (k^2-1)/4. Rescaling the dual rescales rho accordingly; every
/// closed form below assumes this normalisation.

Quat point(double x, double y);
Quat dual_point(double x, double y);
Quat gauss(double y);                       // N = -j e^{-iy}
Quat df(double x, double y, Dir dir);
Quat dfd(double x, double y, Dir dir);
HEndo2 eta(double x, double y, Dir dir);    // exact retraction form

SurfaceGrid grid(const GridShape& shape);       // samples of f
SurfaceGrid dual_grid(const GridShape& shape);  // samples of f^d

/// Family backed by the analytic eta (exact evaluation at every point).
ConnectionFamily analytic_family(const GridShape& shape, int substeps = 4);
/// Family built from sampled f, f^d grids (the generic numeric route).
ConnectionFamily sampled_family(const GridShape& shape, int substeps = 4);

/// Parameters of the closed-form parallel sections: phi = phi^+ + phi^-,
/// branch coefficients m0, m1 per sign, t = sqrt(1+4 rho) on the branch
/// with Im t >= 0 (pinned; rho < -1/4 gives t purely imaginary).
struct SectionParams {
    double rho = 0;
    Complex m0p{0, 0}, m1p{0, 0}, m0m{0, 0}, m1m{0, 0};

    Complex t() const;
    Complex sqrt_rho() const;
};

/// Exact alpha, beta of phi = e alpha + psi beta at (x, y).
void alpha_beta(const SectionParams& p, double x, double y, Quat* alpha, Quat* beta);
HVec2 section_value(const SectionParams& p, double x, double y);

/// Exact section field over a grid (col_scale = 1, closure filled, the
/// multiplier recorded when the parameters give one).
SectionField analytic_section(const GridShape& shape, const SectionParams& p);

/// h+- = -e^{+-i pi t}.
std::pair<Complex, Complex> multiplier_formula(double rho);

/// rho_k = (k^2-1)/4 for k = 2..k_max.
std::vector<double> resonance_points(int k_max);

enum class TransformKind { Single, TwoCylinders, Cp1Rotational, Resonance };
struct TransformClass {
    TransformKind kind;
    double theta = 0;  // rotation angle, Single/TwoCylinders
    int k = 0;         // lobe count at a resonance point
};
std::string to_string(TransformKind k);

TransformClass classify(double rho);

// ---- explicit transforms at rho = 3/4, (m0+, m1+) = (1, 1) ----

/// One-step transform f + alpha beta^{-1} = i p(x) + j q(x) e^{-iy}.
double onestep_p(double x);
double onestep_q(double x);
Quat explicit_one_step(double x, double y);

/// lambda-derivatives of the oracle extension at rho = 3/4.
Quat alpha_dot(double x, double y);
Quat beta_dot(double x, double y);

/// m = (alpha^{-1} alpha-dot - beta^{-1} beta-dot) rho; the Sym section is
/// e alpha + psi beta (1 + m).
Quat sym_m(double x, double y);

/// Offset T of the rotational Sym two-step transform: f-hat-hat = f-hat + T.
Quat explicit_sym_rotational(double x, double y);

/// Offset T of the non-rotational Sym two-step transform for r = 50,
/// including its denominator (for masking near-zero d).
Quat explicit_sym_nonrotational(double x, double y, double* denominator = nullptr);

/// The CMC bubbleton f_2 (transform of phi + tilde-phi j).
Quat bubbleton_point(double x, double y);
/// Section parameters of the tilde part (m0, m1) = (i, -i).
SectionParams bubbleton_tilde_params();
/// Combined section phi_2 = phi + tilde-phi j as exact alpha, beta.
void bubbleton_alpha_beta(double x, double y, Quat* alpha, Quat* beta);
SectionField bubbleton_section(const GridShape& shape);

}  // namespace cyl
}  // namespace isodt
