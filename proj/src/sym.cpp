#include "isodt/sym.hpp"

#include <algorithm>
#include <cmath>

namespace isodt {

LambdaFamily extend_section(const ConnectionFamily& fam, const SectionField& phi1, double rho,
                            LambdaFamily::Rule rule, const cyl::SectionParams* oracle_params) {
    if (rule == LambdaFamily::Rule::Oracle) {
        if (!oracle_params) throw Error("extend_section: oracle rule needs section parameters");
        if (std::abs(oracle_params->rho - rho) > 1e-14)
            throw Error("extend_section: oracle parameters disagree with rho");
        // the oracle extension must pass through phi1 at lambda = rho
        const HVec2 ref = cyl::section_value(*oracle_params, phi1.shape.x0, 0.0);
        const HVec2 have = phi1.at(0, 0);
        if ((ref - have).norm() > 1e-6 * std::max(1.0, have.norm()))
            throw Error("extend_section: oracle parameters do not reproduce phi1 at the seed");
        cyl::SectionParams base = *oracle_params;
        GridShape shape = phi1.shape;
        return LambdaFamily(rule, rho, [base, shape](double lambda) {
            cyl::SectionParams p = base;
            p.rho = lambda;
            return cyl::analytic_section(shape, p);
        });
    }
    const HVec2 seed = phi1.at(0, 0);
    const ConnectionFamily fam_copy = fam;
    return LambdaFamily(rule, rho, [fam_copy, seed](double lambda) {
        return integrate_section(fam_copy, lambda, seed);
    });
}

SectionField lambda_derivative(const LambdaFamily& family, double rho, double eps) {
    if (eps <= 0) eps = default_lambda_eps(rho);
    const SectionField fm2 = family.eval(rho - 2 * eps);
    const SectionField fm1 = family.eval(rho - eps);
    const SectionField fp1 = family.eval(rho + eps);
    const SectionField fp2 = family.eval(rho + 2 * eps);
    const GridShape& s = fm1.shape;

    SectionField out;
    out.shape = s;
    out.lambda = rho;
    out.vals.resize(s.size());
    out.col_scale.assign(s.nx, 1.0);
    const bool closures = fm2.has_closure() && fm1.has_closure() && fp1.has_closure() &&
                          fp2.has_closure();
    if (closures) out.closure.resize(s.nx);

    double worst_disagreement = 0;
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const HVec2 vm2 = fm2.at(ix, iy), vm1 = fm1.at(ix, iy);
            const HVec2 vp1 = fp1.at(ix, iy), vp2 = fp2.at(ix, iy);
            const HVec2 d4 = (vm2 - vp2 + (vp1 - vm1) * 8.0) * (1.0 / (12.0 * eps));
            const HVec2 d2a = (vp1 - vm1) * (1.0 / (2.0 * eps));
            const HVec2 d2b = (vp2 - vm2) * (1.0 / (4.0 * eps));
            const double dis = (d2a - d2b).norm() / std::max(1e-300, d4.norm());
            worst_disagreement = std::max(worst_disagreement, dis);
            out.vals[s.idx(ix, iy)] = d4;
        }
        if (closures)
            out.closure[ix] = (fm2.closure_at(ix) - fp2.closure_at(ix) +
                               (fp1.closure_at(ix) - fm1.closure_at(ix)) * 8.0) *
                              (1.0 / (12.0 * eps));
    }
    if (worst_disagreement > 0.25)
        throw Error("lambda_derivative: stencil disagreement " +
                    std::to_string(worst_disagreement) + " (epsilon too small?)");
    return out;
}

SectionField sym_section(const SectionField& phi1, const SectionField& phi1dot,
                         const SurfaceGrid& f, double rho) {
    const GridShape& s = f.shape;
    if (!s.same_sampling(phi1.shape) || !s.same_sampling(phi1dot.shape))
        throw Error("sym_section: shape mismatch");
    SectionField out;
    out.shape = s;
    out.lambda = rho;
    out.vals.resize(s.size());
    out.col_scale.assign(s.nx, 1.0);
    out.mask.assign(s.size(), 0);

    auto project_combine = [rho](const HVec2& v1, const HVec2& vdot, const Quat& fv,
                                 bool* degenerate) {
        // pi(vdot) = psi b where vdot = phi1 a + psi b
        const SectionSplit s1 = split_section(v1, fv);
        const SectionSplit sd = split_section(vdot, fv);
        *degenerate = s1.alpha.norm() <= kSingularSampleTol * v1.norm();
        if (*degenerate) return v1;
        const Quat b = sd.beta - s1.beta * s1.alpha.inv(v1.norm()) * sd.alpha;
        const HVec2 psi{fv, kOne};
        return v1 - (psi * b) * rho;
    };

    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            bool degenerate = false;
            out.vals[i] = project_combine(phi1.at(ix, iy), phi1dot.at(ix, iy), f.f[i], &degenerate);
            if (degenerate) out.mask[i] = kMaskTouching;
        }
    }
    if (phi1.has_closure() && phi1dot.has_closure()) {
        out.closure.resize(s.nx);
        for (int ix = 0; ix < s.nx; ++ix) {
            bool degenerate = false;
            out.closure[ix] = project_combine(phi1.closure_at(ix), phi1dot.closure_at(ix),
                                              f.at(ix, 0), &degenerate);
        }
        if (phi1.multiplier) out.multiplier = phi1.multiplier;  // same multiplier as phi1
    }
    return out;
}

DarbouxResult sym_two_step(const DarbouxResult& f1, const SectionField& phi11) {
    const GridShape& s = f1.fhat.shape;
    if (!s.same_sampling(phi11.shape)) throw Error("sym_two_step: shape mismatch");
    DarbouxResult out;
    out.base = f1.fhat;
    out.rho = f1.rho;
    out.phi = phi11;
    out.T.assign(s.size(), Quat{});
    out.mask.assign(s.size(), 0);
    out.fhat.shape = s;
    out.fhat.f.assign(s.size(), Quat{});
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            const HVec2 v = phi11.at(ix, iy);
            if (v.bottom.norm() <= kSingularSampleTol * v.norm()) {
                out.mask[i] |= kMaskInfinity;
                out.fhat.f[i] = f1.fhat.f[i];
                continue;
            }
            out.fhat.f[i] = v.top * v.bottom.inv(v.norm());
            out.T[i] = out.fhat.f[i] - f1.fhat.f[i];
            if (out.T[i].norm() <= kSingularSampleTol * std::max(1.0, f1.fhat.f[i].norm()))
                out.mask[i] |= kMaskTouching;
        }
    }
    // Bianchi-type degenerate case: the transform falls back onto the
    // original surface (pi1 phi11 = 0).
    out.returns_original = true;
    const double sc = std::max(1.0, f1.base.scale());
    for (int ix = 0; ix < s.nx && out.returns_original; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            if ((out.fhat.at(ix, iy) - f1.base.at(ix, iy)).norm() > 1e-8 * sc) {
                out.returns_original = false;
                break;
            }
    out.fhat.shape.periodic_y = phi11.multiplier.has_value();
    return out;
}

SectionField general_two_step(const SectionField& phi11, const SectionField& phi12,
                              const Quat& m1, const Quat& m2) {
    if (!phi11.shape.same_sampling(phi12.shape)) throw Error("general_two_step: shape mismatch");
    if (m1.norm() == 0 && m2.norm() == 0) throw Error("general_two_step: both coefficients zero");
    const GridShape& s = phi11.shape;
    SectionField out;
    out.shape = s;
    out.lambda = phi11.lambda;
    out.vals.resize(s.size());
    out.col_scale.assign(s.nx, 1.0);
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            out.vals[s.idx(ix, iy)] = phi11.at(ix, iy) * m1 + phi12.at(ix, iy) * m2;
    if (phi11.has_closure() && phi12.has_closure()) {
        out.closure.resize(s.nx);
        for (int ix = 0; ix < s.nx; ++ix)
            out.closure[ix] = phi11.closure_at(ix) * m1 + phi12.closure_at(ix) * m2;
    }
    // a real common multiplier survives arbitrary quaternionic mixing
    // (measured multipliers match to integration accuracy, not round-off)
    if (phi11.multiplier && phi12.multiplier &&
        std::abs(*phi11.multiplier - *phi12.multiplier) < 1e-6 &&
        std::abs(phi11.multiplier->imag()) < 1e-6)
        out.multiplier = phi11.multiplier;
    return out;
}

Decomposition decompose_parallel_section(const SectionField& target, const SectionField& phi11,
                                         const SectionField& phi12, int ix, int iy) {
    const GridShape& s = target.shape;
    const HVec2 b1 = phi11.at(ix, iy), b2 = phi12.at(ix, iy), t = target.at(ix, iy);
    const HEndo2 B{b1.top, b2.top, b1.bottom, b2.bottom};
    const HVec2 m = endo_inv(B, 1e-10) * t;
    Decomposition out;
    out.m1 = m.top;
    out.m2 = m.bottom;
    for (int jx = 0; jx < s.nx; ++jx)
        for (int jy = 0; jy < s.rows(); ++jy) {
            const HVec2 rec = phi11.at(jx, jy) * out.m1 + phi12.at(jx, jy) * out.m2;
            const HVec2 ref = target.at(jx, jy);
            out.residual = std::max(out.residual,
                                    (rec - ref).norm() / std::max(1e-300, ref.norm()));
        }
    return out;
}

double multiplier_smoothness_defect(const ConnectionFamily& fam, double rho, Complex h1,
                                    double eps, double x) {
    // candidates on each side include the conjugates (the stored
    // representative has Im h >= 0, which flips across a real h1)
    auto candidates = [&](double lambda) {
        const MultiplierSet ms = multipliers(fam, lambda, x);
        std::vector<Complex> out;
        for (const MultiplierPair& p : ms.pairs) {
            out.push_back(p.h);
            out.push_back(std::conj(p.h));
        }
        return out;
    };
    const std::vector<Complex> lo = candidates(rho - eps);
    const std::vector<Complex> hi = candidates(rho + eps);
    double best = std::numeric_limits<double>::infinity();
    for (Complex a : lo)
        for (Complex b : hi)
            best = std::min(best, std::abs(0.5 * (a + b) - h1));
    return best;
}

}  // namespace isodt
