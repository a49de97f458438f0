#include <doctest.h>

#include <cmath>
#include <random>

#include "isodt/cylinder.hpp"
#include "isodt/permute.hpp"
#include "isodt/sym.hpp"

using namespace isodt;

namespace {

GridShape shape(int nx, int ny, double x0 = -2, double x1 = 2, int wraps = 1) {
    GridShape s;
    s.nx = nx;
    s.ny = ny;
    s.wraps = wraps;
    s.x0 = x0;
    s.x1 = x1;
    s.periodic_y = true;
    return s;
}

cyl::SectionParams params34() {
    cyl::SectionParams p;
    p.rho = 0.75;
    p.m0p = p.m1p = 1.0;
    return p;
}

struct SymPipeline {
    GridShape s;
    SurfaceGrid f;
    ConnectionFamily fam;
    SectionField phi1;
    SectionField phidot;
    SectionField phi11;
    DarbouxResult one;

    explicit SymPipeline(const GridShape& shape_in) : s(shape_in), fam(cyl::sampled_family(s)) {
        f = cyl::grid(s);
        const cyl::SectionParams p = params34();
        phi1 = cyl::analytic_section(s, p);
        const LambdaFamily lf = extend_section(fam, phi1, p.rho, LambdaFamily::Rule::Oracle, &p);
        phidot = lambda_derivative(lf, p.rho);
        phi11 = sym_section(phi1, phidot, f, p.rho);
        one = darboux_transform(f, phi1, p.rho);
    }
};

DressedFamily analytic_dressed(const GridShape& s, const cyl::SectionParams& p) {
    DressedFamily::AnalyticInput in;
    in.shape = s;
    in.rho = p.rho;
    in.phi1 = [p](double x, double y) { return cyl::section_value(p, x, y); };
    in.f = [](double x, double y) { return cyl::point(x, y); };
    in.df = [](double x, double y, Dir d) { return cyl::df(x, y, d); };
    return DressedFamily::analytic(in);
}

}  // namespace

TEST_CASE("extension rules return phi1 at lambda = rho") {
    const GridShape s = shape(9, 32, -1, 1);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const cyl::SectionParams p = params34();

    const SectionField analytic = cyl::analytic_section(s, p);
    const LambdaFamily oracle = extend_section(fam, analytic, p.rho, LambdaFamily::Rule::Oracle, &p);
    const SectionField at_rho = oracle.eval(p.rho);
    double worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            worst = std::max(worst, (at_rho.at(ix, iy) - analytic.at(ix, iy)).norm());
    CHECK(worst < 1e-14);

    const SectionField integrated = integrate_section(fam, p.rho, cyl::section_value(p, s.x0, 0.0));
    const LambdaFamily frozen = extend_section(fam, integrated, p.rho, LambdaFamily::Rule::FrozenSeed);
    const SectionField frozen_at_rho = frozen.eval(p.rho);
    worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            worst = std::max(worst, (frozen_at_rho.at(ix, iy) - integrated.at(ix, iy)).norm() /
                                        integrated.at(ix, iy).norm());
    CHECK(worst < 1e-13);  // identical up to the seed-row renormalisation round-off

    CHECK(oracle.rule_name() == "oracle");
    CHECK(frozen.rule_name() == "frozen-seed");
    // the oracle rule demands matching parameters
    cyl::SectionParams wrong = p;
    wrong.m0p = 2.0;
    CHECK_THROWS_AS((void)extend_section(fam, analytic, p.rho, LambdaFamily::Rule::Oracle, &wrong),
                    Error);
}

TEST_CASE("oracle extension matches the closed-form lambda family") {
    const GridShape s = shape(9, 24, -1, 1);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const cyl::SectionParams p = params34();
    const SectionField phi1 = cyl::analytic_section(s, p);
    const LambdaFamily lf = extend_section(fam, phi1, p.rho, LambdaFamily::Rule::Oracle, &p);
    for (double lam : {0.6, 0.9}) {
        const SectionField field = lf.eval(lam);
        const Complex t = std::sqrt(Complex(1 + 4 * lam));
        const Complex sr = std::sqrt(Complex(lam));
        double worst = 0;
        for (int ix = 0; ix < s.nx; ++ix)
            for (int iy = 0; iy < s.rows(); ++iy) {
                const double x = s.xat(ix), y = s.yat(iy);
                // c0 = -4 i sqrt(lam) sinh(sqrt(lam) x), c1 = 2 (1+t) cosh(sqrt(lam) x)
                const Complex c0 = Complex(0, -4) * sr * std::sinh(sr * x);
                const Complex c1 = 2.0 * (1.0 + t) * std::cosh(sr * x);
                const Quat alpha = Quat::from_pair(c0 * std::exp(Complex(0, 0.5) * (1.0 + t) * y),
                                                   c1 * std::exp(Complex(0, 0.5) * (t - 1.0) * y));
                const SectionSplit sp = split_section(field.at(ix, iy), cyl::point(x, y));
                worst = std::max(worst, (sp.alpha - alpha).norm() / alpha.norm());
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("lambda derivative of a constant family vanishes") {
    const GridShape s = shape(9, 16, -1, 1);
    const SectionField phi1 = cyl::analytic_section(s, params34());
    const LambdaFamily constant(LambdaFamily::Rule::Oracle, 0.75, [phi1](double) { return phi1; });
    const SectionField d = lambda_derivative(constant, 0.75);
    for (const HVec2& v : d.vals) CHECK(v.norm() == 0.0);
}

TEST_CASE("lambda derivative matches the closed forms") {
    const GridShape s = shape(17, 32, -1, 1);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const cyl::SectionParams p = params34();
    const SectionField phi1 = cyl::analytic_section(s, p);
    const LambdaFamily lf = extend_section(fam, phi1, p.rho, LambdaFamily::Rule::Oracle, &p);
    const SectionField d = lambda_derivative(lf, p.rho);
    double worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            const double x = s.xat(ix), y = s.yat(iy);
            const Quat ad = cyl::alpha_dot(x, y), bd = cyl::beta_dot(x, y);
            const HVec2 ref{ad + cyl::point(x, y) * bd, bd};  // psi is lambda-independent
            worst = std::max(worst, (d.at(ix, iy) - ref).norm() / (1 + ref.norm()));
        }
    CHECK(worst < 1e-6);

    // Richardson: halving epsilon shrinks the 2-vs-4 point disagreement ~4x
    auto two_point_gap = [&](double eps) {
        const SectionField a = lf.eval(p.rho + eps), b = lf.eval(p.rho - eps);
        const SectionField a2 = lf.eval(p.rho + 2 * eps), b2 = lf.eval(p.rho - 2 * eps);
        double gap = 0;
        for (int ix = 0; ix < s.nx; ix += 4)
            for (int iy = 0; iy < s.rows(); iy += 4) {
                const HVec2 s2a = (a.at(ix, iy) - b.at(ix, iy)) * (0.5 / eps);
                const HVec2 s2b = (a2.at(ix, iy) - b2.at(ix, iy)) * (0.25 / eps);
                gap = std::max(gap, (s2a - s2b).norm());
            }
        return gap;
    };
    const double g1 = two_point_gap(1e-3), g2 = two_point_gap(5e-4);
    CHECK(g1 / g2 > 3.0);
    CHECK(g1 / g2 < 5.0);

    // cancellation guard: at eps near the ulp the stencils are pure noise
    CHECK_THROWS_AS((void)lambda_derivative(lf, p.rho, 2e-16), Error);
}

TEST_CASE("sym section structure") {
    SymPipeline pipe(shape(33, 64, -1, 1));
    const GridShape& s = pipe.s;

    // phi11 = e alpha + psi beta (1 + m) with m(0,0) = -3/4
    const int ix0 = s.nx / 2;
    const SectionSplit base = split_section(pipe.phi1.at(ix0, 0), pipe.f.at(ix0, 0));
    const SectionSplit sym = split_section(pipe.phi11.at(ix0, 0), pipe.f.at(ix0, 0));
    CHECK((sym.alpha - base.alpha).norm() < 1e-10);  // alpha unchanged
    const Quat m = base.beta.inv(base.beta.norm()) * sym.beta - kOne;
    CHECK((m - kOne * (-0.75)).norm() < 1e-9);
    // m matches the closed form samplewise
    double worst = 0;
    for (int ix = 0; ix < s.nx; ix += 3)
        for (int iy = 0; iy < s.rows(); iy += 5) {
            const SectionSplit b = split_section(pipe.phi1.at(ix, iy), pipe.f.at(ix, iy));
            const SectionSplit t = split_section(pipe.phi11.at(ix, iy), pipe.f.at(ix, iy));
            const Quat mm = b.beta.inv(b.beta.norm()) * t.beta - kOne;
            worst = std::max(worst, (mm - cyl::sym_m(s.xat(ix), s.yat(iy))).norm());
        }
    CHECK(worst < 1e-8);

    // pi1(phi11) = phi1 exactly: the phi1-coordinate of phi11 is 1
    double coord = 0;
    for (int ix = 0; ix < s.nx; ix += 3)
        for (int iy = 0; iy < s.rows(); iy += 5) {
            const HVec2 v1 = pipe.phi1.at(ix, iy);
            const HVec2 psi{pipe.f.at(ix, iy), kOne};
            const HEndo2 B{v1.top, psi.top, v1.bottom, psi.bottom};
            const HVec2 coords = endo_inv(B) * pipe.phi11.at(ix, iy);
            coord = std::max(coord, (coords.top - kOne).norm());
        }
    CHECK(coord < 1e-10);

    // parallel for the transform's family
    const DressedFamily dressed = analytic_dressed(s, params34());
    CHECK(parallelism_residual(dressed.family(), 0.75, pipe.phi11) < 1e-7);

    // multiplier inherited from phi1 (resonance: -1); closes over the period
    REQUIRE(pipe.phi11.multiplier.has_value());
    CHECK(std::abs(*pipe.phi11.multiplier - Complex(-1, 0)) < 1e-14);
}

TEST_CASE("sym two-step transform is the rotational closed form") {
    SymPipeline pipe(shape(33, 64, -1, 1));
    const GridShape& s = pipe.s;
    const DarbouxResult two = sym_two_step(pipe.one, pipe.phi11);
    CHECK(!two.returns_original);
    CHECK(two.fhat.shape.periodic_y);
    double worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            worst = std::max(worst, (two.T[s.idx(ix, iy)] -
                                     cyl::explicit_sym_rotational(s.xat(ix), s.yat(iy)))
                                        .norm());
    CHECK(worst < 1e-8);

    // the Bianchi-type section sends f1 back to f (guard test)
    const SectionField phi2 = cyl::bubbleton_section(s);
    const SectionField phi12 = bianchi_type_section(phi2, pipe.f, pipe.phi1);
    const DarbouxResult back = sym_two_step(pipe.one, phi12);
    CHECK(back.returns_original);
    double back_err = 0;
    for (long i = 0; i < s.size(); ++i)
        back_err = std::max(back_err, (back.fhat.f[i] - pipe.f.f[i]).norm());
    CHECK(back_err < 1e-9);
}

TEST_CASE("general two-step combinations") {
    SymPipeline pipe(shape(17, 48, -1, 1));
    const GridShape& s = pipe.s;
    const SectionField phi12 = bianchi_type_section(cyl::bubbleton_section(s), pipe.f, pipe.phi1);

    const SectionField sym_only = general_two_step(pipe.phi11, phi12, kOne, Quat{});
    double d1 = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            d1 = std::max(d1, (sym_only.at(ix, iy) - pipe.phi11.at(ix, iy)).norm());
    CHECK(d1 == 0.0);

    const SectionField bianchi_only = general_two_step(pipe.phi11, phi12, Quat{}, kOne);
    const DarbouxResult back = sym_two_step(pipe.one, bianchi_only);
    CHECK(back.returns_original);

    CHECK_THROWS_AS((void)general_two_step(pipe.phi11, phi12, Quat{}, Quat{}), Error);

    // r = 50 mixture reproduces the non-rotational closed form
    const SectionField mix =
        general_two_step(pipe.phi11, phi12, kOne, Quat::from_pair(Complex(0, 50.0), 0.0));
    const DarbouxResult two = sym_two_step(pipe.one, mix);
    double worst = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            const Quat ref = cyl::explicit_sym_nonrotational(s.xat(ix), s.yat(iy));
            worst = std::max(worst, (two.T[s.idx(ix, iy)] - ref).norm());
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("frozen-seed and oracle extensions differ by a Bianchi-type component") {
    const GridShape s = shape(17, 48, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const cyl::SectionParams p = params34();
    const SectionField phi1 = cyl::analytic_section(s, p);

    const LambdaFamily oracle = extend_section(fam, phi1, p.rho, LambdaFamily::Rule::Oracle, &p);
    const LambdaFamily frozen = extend_section(fam, phi1, p.rho, LambdaFamily::Rule::FrozenSeed);

    // the two extensions genuinely differ away from rho
    const SectionField off_oracle = oracle.eval(0.8);
    const SectionField off_frozen = frozen.eval(0.8);
    double diff = 0;
    for (int ix = 0; ix < s.nx; ix += 4)
        for (int iy = 0; iy < s.rows(); iy += 4)
            diff = std::max(diff, (off_oracle.at(ix, iy) - off_frozen.at(ix, iy)).norm());
    CHECK(diff > 1e-3);

    const SectionField sym_oracle = sym_section(phi1, lambda_derivative(oracle, p.rho), f, p.rho);
    const SectionField sym_frozen = sym_section(phi1, lambda_derivative(frozen, p.rho), f, p.rho);
    const SectionField phi12 = bianchi_type_section(cyl::bubbleton_section(s), f, phi1);
    const Decomposition dec = decompose_parallel_section(sym_frozen, sym_oracle, phi12);
    CHECK(dec.residual < 1e-6);
    CHECK((dec.m1 - kOne).norm() < 1e-6);  // same Sym part, shifted along phi12
}

TEST_CASE("decomposition completeness for a random parallel field") {
    const GridShape s = shape(17, 48, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    SymPipeline pipe(s);
    const SectionField phi12 = bianchi_type_section(cyl::bubbleton_section(s), f, pipe.phi1);
    const DressedFamily dressed = analytic_dressed(s, params34());

    std::mt19937 rng(555);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const HVec2 seed{Quat{u(rng), u(rng), u(rng), u(rng)}, Quat{u(rng), u(rng), u(rng), u(rng)}};
    const SectionField target = integrate_section(dressed.family(), 0.75, seed);
    const Decomposition dec = decompose_parallel_section(target, pipe.phi11, phi12);
    CHECK(dec.residual < 1e-6);
}

TEST_CASE("resonance propagation: every mixture closes") {
    SymPipeline pipe(shape(9, 48, -1, 1, 2));
    const GridShape& s = pipe.s;
    const SectionField phi12 = bianchi_type_section(cyl::bubbleton_section(s), pipe.f, pipe.phi1);
    std::mt19937 rng(808);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Quat m1{u(rng), u(rng), u(rng), u(rng)};
        const Quat m2{u(rng), u(rng), u(rng), u(rng)};
        if (m1.norm() + m2.norm() == 0) continue;
        const SectionField mix = general_two_step(pipe.phi11, phi12, m1, m2);
        double closure = 0;
        for (int ix = 0; ix < s.nx; ++ix)
            for (int iy = 0; iy < s.ny; ++iy) {
                const HVec2 a = mix.at(ix, iy), b = mix.at(ix, iy + s.ny);
                closure = std::max(closure, (b + a).norm() / a.norm());  // h = -1
            }
        CHECK(closure < 1e-6);
    }
}

TEST_CASE("sym section is robust under halving epsilon") {
    const GridShape s = shape(9, 24, -1, 1);
    const SurfaceGrid f = cyl::grid(s);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const cyl::SectionParams p = params34();
    const SectionField phi1 = cyl::analytic_section(s, p);
    const LambdaFamily lf = extend_section(fam, phi1, p.rho, LambdaFamily::Rule::Oracle, &p);
    const SectionField a = sym_section(phi1, lambda_derivative(lf, p.rho, 1e-4), f, p.rho);
    const SectionField b = sym_section(phi1, lambda_derivative(lf, p.rho, 5e-5), f, p.rho);
    double diff = 0;
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            diff = std::max(diff, (a.at(ix, iy) - b.at(ix, iy)).norm());
    CHECK(diff < 1e-6);
}

TEST_CASE("multipliers interpolate smoothly through the resonance") {
    const GridShape s = shape(9, 256, -1, 1);
    const ConnectionFamily fam = cyl::sampled_family(s);
    const double defect = multiplier_smoothness_defect(fam, 0.75, Complex(-1, 0), 1e-3, 0.0);
    CHECK(defect < 1e-5);  // O(eps^2) interpolation through h(rho)
}
