#include "isodt/cylinder.hpp"

#include <cmath>

namespace isodt {
namespace cyl {

namespace {

const double kSqrt3 = std::sqrt(3.0);

Complex expi(double t) { return {std::cos(t), std::sin(t)}; }

Complex branch_sqrt(double v) {
    Complex r = std::sqrt(Complex(v, 0.0));
    if (r.imag() < 0) r = -r;
    return r;
}

bool is_resonance(double rho, int* k_out) {
    const Complex t = branch_sqrt(1.0 + 4.0 * rho);
    if (std::abs(t.imag()) > 1e-9) return false;
    const double k = t.real();
    const int kr = static_cast<int>(std::lround(k));
    if (kr >= 2 && std::abs(k - kr) < 1e-9) {
        if (k_out) *k_out = kr;
        return true;
    }
    return false;
}

}  // namespace

Quat point(double x, double y) {
    return Quat::from_pair(Complex(0, 0.5 * x), 0.5 * expi(-y));
}

Quat dual_point(double x, double y) {
    return Quat::from_pair(Complex(0, -2.0 * x), 2.0 * expi(-y));
}

Quat gauss(double y) { return Quat::from_pair(0.0, -expi(-y)); }

Quat df(double x, double y, Dir dir) {
    (void)x;
    if (dir == Dir::X) return Quat::from_pair(Complex(0, 0.5), 0.0);
    return Quat::from_pair(0.0, Complex(0, -0.5) * expi(-y));
}

Quat dfd(double x, double y, Dir dir) {
    (void)x;
    if (dir == Dir::X) return Quat::from_pair(Complex(0, -2.0), 0.0);
    return Quat::from_pair(0.0, Complex(0, -2.0) * expi(-y));
}

HEndo2 eta(double x, double y, Dir dir) {
    const Quat f = point(x, y);
    const Quat w = dfd(x, y, dir);
    return {f * w, -(f * w * f), w, -(w * f)};
}

SurfaceGrid grid(const GridShape& shape) {
    SurfaceGrid g{shape, std::vector<Quat>(shape.size())};
    g.shape.periodic_y = true;
    for (int ix = 0; ix < shape.nx; ++ix)
        for (int iy = 0; iy < shape.rows(); ++iy)
            g.at(ix, iy) = point(shape.xat(ix), shape.yat(iy));
    return g;
}

SurfaceGrid dual_grid(const GridShape& shape) {
    SurfaceGrid g{shape, std::vector<Quat>(shape.size())};
    g.shape.periodic_y = true;
    for (int ix = 0; ix < shape.nx; ++ix)
        for (int iy = 0; iy < shape.rows(); ++iy)
            g.at(ix, iy) = dual_point(shape.xat(ix), shape.yat(iy));
    return g;
}

ConnectionFamily analytic_family(const GridShape& shape, int substeps) {
    GridShape s = shape;
    s.periodic_y = true;
    return ConnectionFamily{
        RetractionForm::analytic(s, [](double x, double y, Dir d) { return eta(x, y, d); }),
        substeps};
}

ConnectionFamily sampled_family(const GridShape& shape, int substeps) {
    return make_family(grid(shape), dual_grid(shape), substeps);
}

Complex SectionParams::t() const { return branch_sqrt(1.0 + 4.0 * rho); }
Complex SectionParams::sqrt_rho() const { return branch_sqrt(rho); }

namespace {

// One branch: alpha = c0 e^{i(1+st)y/2} + j c1 e^{i(st-1)y/2},
//             beta  = c1(st-1) e^{i(1+st)y/2} + j c0(1+st) e^{i(st-1)y/2}.
void branch_alpha_beta(const SectionParams& p, int sign, double x, double y,
                       Quat* alpha, Quat* beta) {
    const Complex m0 = sign > 0 ? p.m0p : p.m0m;
    const Complex m1 = sign > 0 ? p.m1p : p.m1m;
    if (m0 == Complex{} && m1 == Complex{}) {
        *alpha = Quat{};
        *beta = Quat{};
        return;
    }
    const Complex sr = p.sqrt_rho();
    const Complex st = static_cast<double>(sign) * p.t();
    const Complex ep = std::exp(sr * x), em = std::exp(-sr * x);
    const Complex c0 = Complex(0, -2) * sr * (m0 * ep - m1 * em);
    const Complex c1 = (1.0 + st) * (m0 * ep + m1 * em);
    const Complex ea = std::exp(Complex(0, 0.5) * (1.0 + st) * y);
    const Complex eb = std::exp(Complex(0, 0.5) * (st - 1.0) * y);
    *alpha = Quat::from_pair(c0 * ea, c1 * eb);
    *beta = Quat::from_pair(c1 * (st - 1.0) * ea, c0 * (1.0 + st) * eb);
}

}  // namespace

void alpha_beta(const SectionParams& p, double x, double y, Quat* alpha, Quat* beta) {
    if (p.rho == 0.0) throw Error("cylinder sections need rho != 0");
    Quat ap, bp, am, bm;
    branch_alpha_beta(p, +1, x, y, &ap, &bp);
    branch_alpha_beta(p, -1, x, y, &am, &bm);
    *alpha = ap + am;
    *beta = bp + bm;
}

HVec2 section_value(const SectionParams& p, double x, double y) {
    Quat a, b;
    alpha_beta(p, x, y, &a, &b);
    const Quat f = point(x, y);
    return {a + f * b, b};
}

SectionField analytic_section(const GridShape& shape, const SectionParams& p) {
    SectionField out;
    out.shape = shape;
    out.lambda = p.rho;
    out.vals.resize(shape.size());
    out.col_scale.assign(shape.nx, 1.0);
    out.closure.resize(shape.nx);
    for (int ix = 0; ix < shape.nx; ++ix) {
        for (int iy = 0; iy < shape.rows(); ++iy)
            out.vals[shape.idx(ix, iy)] = section_value(p, shape.xat(ix), shape.yat(iy));
        out.closure[ix] = section_value(p, shape.xat(ix), 2.0 * M_PI * shape.wraps);
    }
    const bool plus_only = p.m0m == Complex{} && p.m1m == Complex{};
    const bool minus_only = p.m0p == Complex{} && p.m1p == Complex{};
    int k = 0;
    auto [hp, hm] = multiplier_formula(p.rho);
    if (is_resonance(p.rho, &k))
        out.multiplier = hp;  // every section closes at a resonance point
    else if (plus_only)
        out.multiplier = hp;
    else if (minus_only)
        out.multiplier = hm;
    return out;
}

std::pair<Complex, Complex> multiplier_formula(double rho) {
    if (rho == 0.0) throw Error("multiplier_formula: rho must be nonzero");
    const Complex t = branch_sqrt(1.0 + 4.0 * rho);
    const Complex ipt = Complex(0, M_PI) * t;
    return {-std::exp(ipt), -std::exp(-ipt)};
}

std::vector<double> resonance_points(int k_max) {
    if (k_max < 2) throw Error("resonance_points: k_max must be >= 2");
    std::vector<double> out;
    for (int k = 2; k <= k_max; ++k) out.push_back((static_cast<double>(k) * k - 1.0) / 4.0);
    return out;
}

std::string to_string(TransformKind k) {
    switch (k) {
        case TransformKind::Single: return "single";
        case TransformKind::TwoCylinders: return "two-cylinders";
        case TransformKind::Cp1Rotational: return "cp1-rotational";
        case TransformKind::Resonance: return "resonance";
    }
    return "?";
}

TransformClass classify(double rho) {
    if (rho == 0.0) throw Error("classify: rho must be nonzero");
    TransformClass out{};
    int k = 0;
    if (std::abs(1.0 + 4.0 * rho) < 1e-12) {
        out.kind = TransformKind::Single;
        out.theta = M_PI;
        return out;
    }
    if (is_resonance(rho, &k)) {
        out.kind = TransformKind::Resonance;
        out.k = k;
        return out;
    }
    if (rho < -0.25) {
        const Complex t = branch_sqrt(1.0 + 4.0 * rho);
        out.kind = TransformKind::TwoCylinders;
        out.theta = std::arg(-(1.0 + t) / (1.0 - t));
        return out;
    }
    out.kind = TransformKind::Cp1Rotational;
    return out;
}

double onestep_p(double x) {
    return 0.5 * x + 2.0 * kSqrt3 * std::sinh(kSqrt3 * x) / (3.0 - 6.0 * std::cosh(kSqrt3 * x));
}

double onestep_q(double x) { return 1.0 / (2.0 * std::cosh(kSqrt3 * x) - 1.0) + 0.5; }

Quat explicit_one_step(double x, double y) {
    return Quat::from_pair(Complex(0, onestep_p(x)), onestep_q(x) * expi(-y));
}

Quat alpha_dot(double x, double y) {
    const double c = std::cosh(kSqrt3 * x / 2), s = std::sinh(kSqrt3 * x / 2);
    const Complex t1 = Complex(0, -1.0 / 3.0) * std::exp(Complex(0, 1.5) * y) *
                       (6.0 * x * c + kSqrt3 * (4.0 + Complex(0, 3.0) * y) * s);
    const Complex t2 = 0.5 * std::exp(Complex(-kSqrt3 * x / 2, 0.5 * y)) *
                       (std::exp(kSqrt3 * x) * (2.0 * kSqrt3 * x + Complex(0, 3.0) * y + 2.0) -
                        2.0 * kSqrt3 * x + Complex(0, 3.0) * y + 2.0);
    return Quat::from_pair(t1, t2);
}

Quat beta_dot(double x, double y) {
    const double c = std::cosh(kSqrt3 * x / 2), s = std::sinh(kSqrt3 * x / 2);
    const Complex t1 = 0.5 * std::exp(Complex(-kSqrt3 * x / 2, 1.5 * y)) *
                       (std::exp(kSqrt3 * x) * (2.0 * kSqrt3 * x + Complex(0, 3.0) * y + 8.0) -
                        2.0 * kSqrt3 * x + Complex(0, 3.0) * y + 8.0);
    const Complex t2 = Complex(0, -3.0) * std::exp(Complex(0, 0.5) * y) *
                       (2.0 * x * c + kSqrt3 * (2.0 + Complex(0, 1.0) * y) * s);
    return Quat::from_pair(t1, t2);
}

Quat sym_m(double x, double y) {
    const double ch1 = std::cosh(kSqrt3 * x), ch2 = std::cosh(2.0 * kSqrt3 * x);
    const double sh1 = std::sinh(kSqrt3 * x);
    const double den = 2.0 * ch2 + 1.0;
    const double re = (4.0 * kSqrt3 * x * sh1 + 3.0 * ch1) / den + 2.0;
    const Complex jpart = std::exp(Complex(0, 2.0) * y) * (kSqrt3 * sh1 - 12.0 * x * ch1) / den;
    // m = -(re + j i jpart)/4 ; note j i c = j (i c)
    return (Quat::from_pair(Complex(re, 0), Complex{}) +
            kJ * kI * Quat::from_pair(jpart, Complex{})) *
           (-0.25);
}

Quat explicit_sym_rotational(double x, double y) {
    const double c1 = std::cosh(kSqrt3 * x), c2 = std::cosh(2.0 * kSqrt3 * x);
    const double s1 = std::sinh(kSqrt3 * x), s2 = std::sinh(2.0 * kSqrt3 * x);
    const double base = 48.0 * x * x - 16.0 * kSqrt3 * x * s1 - 12.0 * c1 + 8.0 * c2 + 7.0;
    const double D = (2.0 * c1 - 1.0) * base;
    const double ipart =
        2.0 * (kSqrt3 * s1 * (48.0 * x * x - 8.0 * c2 - 7.0) + 72.0 * x * c1) / (3.0 * D);
    const Complex jpart =
        expi(-y) * (-48.0 * x * x + 16.0 * kSqrt3 * x * s2 + 4.0 * c2 + 5.0) / D;
    return Quat::from_pair(Complex(0, ipart), jpart);
}

Quat explicit_sym_nonrotational(double x, double y, double* denominator) {
    const double c1 = std::cosh(kSqrt3 * x), c2 = std::cosh(2.0 * kSqrt3 * x);
    const double s1 = std::sinh(kSqrt3 * x), s2 = std::sinh(2.0 * kSqrt3 * x);
    const double A = 48.0 * x * x - 16.0 * kSqrt3 * x * s2 - 4.0 * c2 + 639995.0;
    const double d = 3.0 * (1.0 - 2.0 * c1) * (1.0 - 2.0 * c1) * (2.0 * c1 + 1.0) *
                     (48.0 * x * x - 16.0 * kSqrt3 * x * s1 - 12.0 * c1 + 8.0 * c2 +
                      1600.0 * kSqrt3 * (1.0 - 2.0 * c1) * std::sin(2.0 * y) + 640007.0);
    if (denominator) *denominator = d;
    const double T1 =
        (2.0 / d) * (2.0 * c2 + 1.0) *
        (kSqrt3 * s1 * (48.0 * x * x - 8.0 * c2 + 639993.0) + 72.0 * x * c1);
    const double sy = std::sin(y);
    const double T2 = (1.0 / d) * (4.0 * c1 * c1 - 1.0) *
                      (-3.0 * A * std::cos(y) - 3200.0 * kSqrt3 * (2.0 * c2 + 1.0) * sy * sy * sy);
    const double T3 = -(1.0 / d) * (2.0 * c2 + 1.0) *
                      (3.0 * A * sy + 2400.0 * kSqrt3 * (2.0 * c2 + 1.0) * std::cos(y) +
                       800.0 * kSqrt3 * (2.0 * c2 + 1.0) * std::cos(3.0 * y));
    return Quat::vec(T1, T2, T3);
}

Quat bubbleton_point(double x, double y) {
    const double c1 = std::cosh(kSqrt3 * x), s1 = std::sinh(kSqrt3 * x);
    const double comp1 = 0.5 * x + 2.0 * s1 / (3.0 * std::cos(2.0 * y) - 2.0 * kSqrt3 * c1);
    const double comp2 = 0.5 * std::cos(y) + (3.0 * std::cos(y) - std::cos(3.0 * y)) /
                                                 (6.0 * std::cos(2.0 * y) - 4.0 * kSqrt3 * c1);
    const double comp3 =
        0.5 * std::sin(y) +
        0.5 * std::sin(y) / ((kSqrt3 * c1 + 3.0) / (std::cos(2.0 * y) + 2.0) - 1.5);
    return Quat::vec(comp1, comp2, comp3);
}

SectionParams bubbleton_tilde_params() {
    SectionParams p;
    p.rho = 0.75;
    p.m0p = Complex(0, 1);
    p.m1p = Complex(0, -1);
    return p;
}

void bubbleton_alpha_beta(double x, double y, Quat* alpha, Quat* beta) {
    SectionParams base;
    base.rho = 0.75;
    base.m0p = base.m1p = 1.0;
    Quat a, b, at, bt;
    alpha_beta(base, x, y, &a, &b);
    alpha_beta(bubbleton_tilde_params(), x, y, &at, &bt);
    *alpha = a + at * kJ;
    *beta = b + bt * kJ;
}

SectionField bubbleton_section(const GridShape& shape) {
    SectionField out;
    out.shape = shape;
    out.lambda = 0.75;
    out.vals.resize(shape.size());
    out.col_scale.assign(shape.nx, 1.0);
    out.closure.resize(shape.nx);
    auto value = [](double x, double y) {
        Quat a, b;
        bubbleton_alpha_beta(x, y, &a, &b);
        const Quat f = point(x, y);
        return HVec2{a + f * b, b};
    };
    for (int ix = 0; ix < shape.nx; ++ix) {
        for (int iy = 0; iy < shape.rows(); ++iy)
            out.vals[shape.idx(ix, iy)] = value(shape.xat(ix), shape.yat(iy));
        out.closure[ix] = value(shape.xat(ix), 2.0 * M_PI * shape.wraps);
    }
    out.multiplier = Complex(-1.0, 0.0);  // rho = 3/4 is a resonance point
    return out;
}

}  // namespace cyl
}  // namespace isodt
