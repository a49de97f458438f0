#include "isodt/permute.hpp"

#include <algorithm>
#include <cmath>

namespace isodt {

ChiField chi(const ConnectionFamily& fam, const SectionField& phi1, const SectionField& phi2,
             double abort_tol) {
    const GridShape& s = phi1.shape;
    if (!s.same_sampling(phi2.shape)) throw Error("chi: shape mismatch");
    const double rho1 = phi1.lambda, rho2 = phi2.lambda;
    ChiField out{s, std::vector<Quat>(s.size()), 0.0};
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            const HVec2 v1 = phi1.at(ix, iy), v2 = phi2.at(ix, iy);
            Quat cx, cy;
            bool have_x = false, have_y = false;
            for (Dir dir : {Dir::X, Dir::Y}) {
                const HEndo2 E = fam.eta.at(ix, iy, dir);
                // d phi = -rho (eta phi) = psi w with w = -rho (eta phi).bottom
                const Quat w1 = (E * v1).bottom * (-rho1);
                const Quat w2 = (E * v2).bottom * (-rho2);
                if (w1.norm() <= kSingularEps * std::max(1.0, v1.norm() * E.norm()))
                    throw Error("chi: d phi_1 vanishes at a sample");
                const Quat c = w1.inv(v1.norm() * E.norm()) * w2;
                if (dir == Dir::X) { cx = c; have_x = true; }
                else { cy = c; have_y = true; }
            }
            (void)have_x; (void)have_y;
            const double mismatch = (cx - cy).norm() / std::max(1e-300, cx.norm() + cy.norm());
            out.direction_mismatch = std::max(out.direction_mismatch, mismatch);
            if (mismatch > abort_tol)
                throw Error("chi: direction mismatch " + std::to_string(mismatch) +
                            " (input sections not parallel?)");
            out.chi[i] = (cx + cy) * 0.5;
        }
    }
    return out;
}

TwoStepResult bianchi_two_step(const ConnectionFamily& fam, const SurfaceGrid& f,
                               const SectionField& phi1, const SectionField& phi2) {
    const GridShape& s = f.shape;
    if (!s.same_sampling(phi1.shape) || !s.same_sampling(phi2.shape))
        throw Error("bianchi_two_step: shape mismatch");
    const double rho1 = phi1.lambda, rho2 = phi2.lambda;

    // enveloping condition f1 != f2 for distinct parameters
    if (std::abs(rho1 - rho2) > 1e-14) {
        double min_sep = std::numeric_limits<double>::infinity();
        double scale = 0;
        for (int ix = 0; ix < s.nx; ++ix) {
            for (int iy = 0; iy < s.rows(); ++iy) {
                const SectionSplit a = split_section(phi1.at(ix, iy), f.at(ix, iy));
                const SectionSplit b = split_section(phi2.at(ix, iy), f.at(ix, iy));
                const Quat f1 = f.at(ix, iy) + a.alpha * a.beta.inv(phi1.at(ix, iy).norm());
                const Quat f2 = f.at(ix, iy) + b.alpha * b.beta.inv(phi2.at(ix, iy).norm());
                min_sep = std::min(min_sep, (f1 - f2).norm());
                scale = std::max(scale, std::max(f1.norm(), f2.norm()));
            }
        }
        if (min_sep <= 1e-9 * std::max(1.0, scale))
            throw Error("bianchi_two_step: enveloping condition violated (f1 meets f2)");
    }

    const ChiField x = chi(fam, phi1, phi2);
    TwoStepResult out;
    out.chi_mismatch = x.direction_mismatch;
    out.phi12.shape = s;
    out.phi12.lambda = rho2;
    out.phi12.vals.resize(s.size());
    out.phi12.col_scale.assign(s.nx, 1.0);
    out.f12.shape = s;
    out.f12.f.resize(s.size());
    out.T_from_f1.resize(s.size());
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            const HVec2 v = phi2.at(ix, iy) - phi1.at(ix, iy) * x.chi[i];
            out.phi12.vals[i] = v;
            out.f12.f[i] = v.top * v.bottom.inv(v.norm());
            const SectionSplit a = split_section(phi1.at(ix, iy), f.at(ix, iy));
            const Quat f1 = f.at(ix, iy) + a.alpha * a.beta.inv(phi1.at(ix, iy).norm());
            out.T_from_f1[i] = out.f12.f[i] - f1;
        }
    }
    // closure row: chi evaluated there directly (eta is y-periodic)
    if (phi1.has_closure() && phi2.has_closure()) {
        out.phi12.closure.resize(s.nx);
        for (int ix = 0; ix < s.nx; ++ix) {
            const HVec2 v1 = phi1.closure_at(ix), v2 = phi2.closure_at(ix);
            const HEndo2 E = fam.eta.at(ix, 0, Dir::X);
            const Quat w1 = (E * v1).bottom * (-rho1);
            const Quat w2 = (E * v2).bottom * (-rho2);
            out.phi12.closure[ix] = v2 - v1 * (w1.inv(v1.norm() * E.norm()) * w2);
        }
        // the common transform of closed transforms is closed with h2
        if (phi1.multiplier && phi2.multiplier) out.phi12.multiplier = phi2.multiplier;
    }
    out.f12.shape.periodic_y = out.phi12.multiplier.has_value();
    return out;
}

SectionField bianchi_type_section(const SectionField& phi2, const SurfaceGrid& f,
                                  const SectionField& phi1) {
    const GridShape& s = f.shape;
    if (!s.same_sampling(phi1.shape) || !s.same_sampling(phi2.shape))
        throw Error("bianchi_type_section: shape mismatch");
    if (std::abs(phi1.lambda - phi2.lambda) > 1e-12)
        throw Error("bianchi_type_section: spectral parameters must agree");
    SectionField out;
    out.shape = s;
    out.lambda = phi2.lambda;
    out.vals.resize(s.size());
    out.col_scale.assign(s.nx, 1.0);
    double wmax = 0, scale = 0;
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            const SectionSplit s1 = split_section(phi1.at(ix, iy), f.f[i]);
            const SectionSplit s2 = split_section(phi2.at(ix, iy), f.f[i]);
            const Quat w = s2.beta - s1.beta * s1.alpha.inv(phi1.at(ix, iy).norm()) * s2.alpha;
            const HVec2 psi{f.f[i], kOne};
            out.vals[i] = psi * w;
            wmax = std::max(wmax, w.norm());
            scale = std::max(scale, phi2.at(ix, iy).norm());
        }
    }
    if (wmax <= 1e-10 * scale)
        throw Error("bianchi_type_section: phi2 lies in phi1 H (projection vanishes)");
    if (phi1.has_closure() && phi2.has_closure()) {
        out.closure.resize(s.nx);
        for (int ix = 0; ix < s.nx; ++ix) {
            const Quat fv = f.at(ix, 0);  // f periodic in y
            const SectionSplit s1 = split_section(phi1.closure_at(ix), fv);
            const SectionSplit s2 = split_section(phi2.closure_at(ix), fv);
            const Quat w = s2.beta - s1.beta * s1.alpha.inv(phi1.closure_at(ix).norm()) * s2.alpha;
            out.closure[ix] = HVec2{fv, kOne} * w;
        }
        if (phi2.multiplier) out.multiplier = phi2.multiplier;
    }
    return out;
}

CrossRatioField cross_ratio(const SurfaceGrid& f, const SurfaceGrid& f1, const SurfaceGrid& f12,
                            const SurfaceGrid& f2, double coincide_tol) {
    const GridShape& s = f.shape;
    if (!s.same_sampling(f1.shape) || !s.same_sampling(f12.shape) || !s.same_sampling(f2.shape))
        throw Error("cross_ratio: shape mismatch");
    CrossRatioField out{s, std::vector<Quat>(s.size()), std::vector<unsigned char>(s.size(), 1)};
    const double scale = std::max({f.scale(), f1.scale(), f12.scale(), f2.scale(), 1.0});
    for (long i = 0; i < s.size(); ++i) {
        const Quat ab = f.f[i] - f1.f[i];
        const Quat bc = f1.f[i] - f12.f[i];
        const Quat cd = f12.f[i] - f2.f[i];
        const Quat da = f2.f[i] - f.f[i];
        if (bc.norm() <= coincide_tol * scale || da.norm() <= coincide_tol * scale) {
            out.valid[i] = 0;
            continue;
        }
        out.cr[i] = ab * bc.inv(scale) * cd * da.inv(scale);
    }
    return out;
}

}  // namespace isodt
