#include "isodt/darboux.hpp"

#include <algorithm>
#include <cmath>

namespace isodt {

SectionSplit split_section(const HVec2& phi, const Quat& f) {
    return {phi.top - f * phi.bottom, phi.bottom};
}

SectionSplit split_section(const HVec2& phi, const HVec2& psi) {
    // phi = e alpha + psi beta: bottom gives beta, top the alpha remainder.
    const Quat beta = psi.bottom.inv(psi.norm()) * phi.bottom;
    const Quat alpha = phi.top - psi.top * beta;
    return {alpha, beta};
}

int DarbouxResult::singular_count() const {
    int n = 0;
    for (unsigned char m : mask) n += m != 0;
    return n;
}

DarbouxResult darboux_transform(const SurfaceGrid& f, const SectionField& phi, double rho,
                                const ConnectionFamily* fam, double parallel_tol) {
    if (!f.shape.same_sampling(phi.shape)) throw Error("darboux_transform: shape mismatch");
    if (rho == 0.0) throw Error("darboux_transform: rho must be nonzero");
    if (fam) {
        // spot-check parallelism on a sparse set of edges
        const GridShape& s = f.shape;
        double worst = 0;
        const int step = std::max(1, s.nx / 8);
        for (int ix = 0; ix < s.nx - 1; ix += step) {
            for (int iy = 0; iy < s.rows() - 1; iy += std::max(1, s.rows() / 8)) {
                const HVec2 tx = transport_edge(*fam, rho, phi.at(ix, iy), ix, iy, Dir::X);
                worst = std::max(worst, (phi.at(ix + 1, iy) - tx).norm() /
                                            std::max(1e-300, phi.at(ix + 1, iy).norm()));
                const HVec2 ty = transport_edge(*fam, rho, phi.at(ix, iy), ix, iy, Dir::Y);
                worst = std::max(worst, (phi.at(ix, iy + 1) - ty).norm() /
                                            std::max(1e-300, phi.at(ix, iy + 1).norm()));
            }
        }
        if (worst > parallel_tol)
            throw Error("darboux_transform: section is not d_rho-parallel (residual " +
                        std::to_string(worst) + ")");
    }

    const GridShape& s = f.shape;
    DarbouxResult out;
    out.base = f;
    out.rho = rho;
    out.phi = phi;
    out.T.assign(s.size(), Quat{});
    out.mask.assign(s.size(), 0);
    out.fhat.shape = s;
    out.fhat.f.assign(s.size(), Quat{});

    long touching = 0;
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            const HVec2 v = phi.at(ix, iy);
            const SectionSplit sp = split_section(v, f.f[i]);
            const double nv = v.norm();
            if (sp.alpha.norm() <= kSingularSampleTol * nv) {
                out.mask[i] |= kMaskTouching;
                ++touching;
            }
            if (sp.beta.norm() <= kSingularSampleTol * nv) {
                out.mask[i] |= kMaskInfinity;
                out.T[i] = Quat{};
                out.fhat.f[i] = f.f[i];
                continue;
            }
            out.T[i] = sp.alpha * sp.beta.inv(nv);
            out.fhat.f[i] = f.f[i] + out.T[i];
        }
    }
    if (touching == s.size())
        throw Error("darboux_transform: section lies in the line bundle of f (alpha == 0)");

    // transform closes iff the section has a multiplier; decide by closure row
    out.fhat.shape.periodic_y = false;
    if (phi.has_closure()) {
        double closure = 0;
        for (int ix = 0; ix < s.nx; ++ix) {
            const SectionSplit a = split_section(phi.at(ix, 0), f.at(ix, 0));
            const SectionSplit b = split_section(phi.closure_at(ix), f.at(ix, 0));
            if (a.beta.norm() < kSingularSampleTol || b.beta.norm() < kSingularSampleTol) continue;
            const Quat t0 = a.alpha * a.beta.inv(1.0);
            const Quat t1 = b.alpha * b.beta.inv(1.0);
            closure = std::max(closure, (t1 - t0).norm());
        }
        out.fhat.shape.periodic_y = closure < 1e-6 * std::max(1.0, out.fhat.scale());
    }
    out.returns_original = true;
    const double sc = std::max(1.0, f.scale());
    for (const Quat& t : out.T)
        if (t.norm() > 1e-10 * sc) { out.returns_original = false; break; }
    return out;
}

double riccati_residual(const SurfaceGrid& f, const SurfaceGrid& fd,
                        const std::vector<Quat>& T, double rho) {
    const GridShape& s = f.shape;
    if (!s.same_sampling(fd.shape) || static_cast<long>(T.size()) != s.size())
        throw Error("riccati_residual: shape mismatch");
    // 6th-order stencils: the identity is exact, only stencil error remains
    const TangentField tf{s, diff_x(s, f.f, 6), diff_y(s, f.f, 6)};
    const TangentField td{s, diff_x(s, fd.f, 6), diff_y(s, fd.f, 6)};
    const std::vector<Quat> Tx = diff_x(s, T, 6);
    const std::vector<Quat> Ty = diff_y(s, T, 6);
    double worst = 0;
    for (long i = 0; i < s.size(); ++i) {
        const double nrm = tf.fx[i].norm() + std::abs(rho) * T[i].norm2() * td.fx[i].norm() + 1e-300;
        const Quat rx = Tx[i] + tf.fx[i] - T[i] * td.fx[i] * rho * T[i];
        const Quat ry = Ty[i] + tf.fy[i] - T[i] * td.fy[i] * rho * T[i];
        worst = std::max(worst, std::max(rx.norm(), ry.norm()) / nrm);
    }
    return worst;
}

std::vector<double> darboux_mean_curvature(const SurfaceGrid& f, const SurfaceGrid& fd,
                                           const std::vector<Quat>& T, double rho,
                                           const TangentField* fd_frames, double conformal_tol) {
    const GridShape& s = f.shape;
    if (!s.same_sampling(fd.shape) || static_cast<long>(T.size()) != s.size())
        throw Error("darboux_mean_curvature: shape mismatch");
    const std::vector<Quat> N = gauss_map(f, conformal_tol);
    const std::vector<double> Hd =
        fd_frames ? mean_curvature(s, *fd_frames) : mean_curvature(fd);
    const double tscale = [&] {
        double m = 0;
        for (const Quat& t : T) m = std::max(m, t.norm());
        return m;
    }();
    std::vector<double> H(s.size());
    for (long i = 0; i < s.size(); ++i) {
        const double t2 = T[i].norm2();
        if (t2 <= kSingularSampleTol * tscale * tscale)
            throw Error("darboux_mean_curvature: |T| ~ 0 at a sample");
        H[i] = -(Hd[i] / rho - 2.0 * dot(T[i], N[i])) / t2;
    }
    return H;
}

std::vector<double> cmc_obstruction(const SurfaceGrid& f, const SurfaceGrid& fd,
                                    const std::vector<Quat>& T, double rho, double Hhat,
                                    const TangentField* fd_frames, double conformal_tol) {
    const GridShape& s = f.shape;
    const TangentField tf = discrete_diff(f);
    const std::vector<double> H = mean_curvature(s, tf, conformal_tol);
    const std::vector<double> Hd =
        fd_frames ? mean_curvature(s, *fd_frames, conformal_tol) : mean_curvature(fd);
    const std::vector<double> Hdx = diff_x(s, Hd);
    const std::vector<double> Hdy = diff_y(s, Hd);
    std::vector<double> out(s.size());
    for (long i = 0; i < s.size(); ++i) {
        const double ox = (H[i] - Hhat) * dot(tf.fx[i], T[i]) + Hdx[i] / (2.0 * rho);
        const double oy = (H[i] - Hhat) * dot(tf.fy[i], T[i]) + Hdy[i] / (2.0 * rho);
        out[i] = std::max(std::abs(ox), std::abs(oy));
    }
    return out;
}

double DressedFamily::sigma(double rho, double lambda) {
    if (rho == lambda) throw Error("sigma has a pole at lambda = rho");
    return rho / (rho - lambda);
}

HEndo2 DressedFamily::gauge(int ix, int iy, double lambda) const {
    return pihat(ix, iy) + pi(ix, iy) * sigma(rho_, lambda);
}

namespace {

struct SampleProj {
    HEndo2 pi, pihat;
    double cond;
    bool ok;
};

// Projections of the splitting H^2 = span(phi1) + span(psi) and the
// transformed form etahat(X) = -pihat [0 | psi_X] B^{-1} / rho, which is
// -pihat o d o pi / rho evaluated pointwise.
SampleProj projections_at(const HVec2& phi1, const Quat& f) {
    const HVec2 psi{f, kOne};
    const HEndo2 B{phi1.top, psi.top, phi1.bottom, psi.bottom};
    SampleProj out{};
    try {
        const HEndo2 Binv = endo_inv(B, 1e-10);
        const HEndo2 E1{kOne, Quat{}, Quat{}, Quat{}};
        const HEndo2 E2{Quat{}, Quat{}, Quat{}, kOne};
        out.pihat = B * E1 * Binv;
        out.pi = B * E2 * Binv;
        out.cond = B.norm() * Binv.norm();
        out.ok = true;
    } catch (const Error&) {
        out.ok = false;
        out.cond = std::numeric_limits<double>::infinity();
    }
    return out;
}

HEndo2 eta_hat_at(const SampleProj& p, const HVec2& phi1, const Quat& f, const Quat& df,
                  double rho) {
    const HVec2 psi{f, kOne};
    const HEndo2 B{phi1.top, psi.top, phi1.bottom, psi.bottom};
    const HEndo2 Binv = endo_inv(B, 1e-10);
    const HEndo2 mid{Quat{}, df, Quat{}, Quat{}};  // columns [0 | psi_X], psi_X = (df, 0)
    return p.pihat * mid * Binv * (-1.0 / rho);
}

}  // namespace

DressedFamily DressedFamily::build(const ConnectionFamily& fam, const DarbouxResult& result) {
    const GridShape& s = result.base.shape;
    DressedFamily out;
    out.rho_ = result.rho;
    out.pi_.resize(s.size());
    out.pihat_.resize(s.size());
    out.cond_.resize(s.size());
    out.mask_ = result.mask;
    if (out.mask_.empty()) out.mask_.assign(s.size(), 0);

    const TangentField tf{s, diff_x(s, result.base.f, 6), diff_y(s, result.base.f, 6)};
    std::vector<HEndo2> ex(s.size()), ey(s.size());
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            const HVec2 v = result.phi.at(ix, iy);
            const SampleProj p = projections_at(v, result.base.f[i]);
            if (!p.ok || (out.mask_[i] & kMaskTouching)) {
                out.mask_[i] |= kMaskTouching;
                out.pi_[i] = HEndo2::identity();
                out.pihat_[i] = HEndo2::zero();
                out.cond_[i] = p.cond;
                ex[i] = HEndo2::zero();
                ey[i] = HEndo2::zero();
                continue;
            }
            out.pi_[i] = p.pi;
            out.pihat_[i] = p.pihat;
            out.cond_[i] = p.cond;
            ex[i] = eta_hat_at(p, v, result.base.f[i], tf.fx[i], result.rho);
            ey[i] = eta_hat_at(p, v, result.base.f[i], tf.fy[i], result.rho);
        }
    }
    GridShape es = s;
    es.periodic_y = s.periodic_y && result.phi.multiplier.has_value();
    out.fam_ = ConnectionFamily{RetractionForm::from_samples(es, std::move(ex), std::move(ey)),
                                fam.substeps};
    return out;
}

DressedFamily DressedFamily::analytic(const AnalyticInput& in) {
    if (in.rho == 0.0) throw Error("dressed family: rho must be nonzero");
    DressedFamily out;
    out.rho_ = in.rho;
    const GridShape& s = in.shape;
    out.pi_.resize(s.size());
    out.pihat_.resize(s.size());
    out.cond_.resize(s.size());
    out.mask_.assign(s.size(), 0);
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy < s.rows(); ++iy) {
            const long i = s.idx(ix, iy);
            const SampleProj p = projections_at(in.phi1(s.xat(ix), s.yat(iy)), in.f(s.xat(ix), s.yat(iy)));
            if (!p.ok) throw Error("dressed family: degenerate splitting sample");
            out.pi_[i] = p.pi;
            out.pihat_[i] = p.pihat;
            out.cond_[i] = p.cond;
        }
    }
    const double rho = in.rho;
    auto phi1 = in.phi1;
    auto f = in.f;
    auto df = in.df;
    auto eval = [rho, phi1, f, df](double x, double y, Dir dir) -> HEndo2 {
        const HVec2 v = phi1(x, y);
        const Quat fv = f(x, y);
        const SampleProj p = projections_at(v, fv);
        if (!p.ok) throw Error("dressed family: degenerate splitting point");
        return eta_hat_at(p, v, fv, df(x, y, dir), rho);
    };
    GridShape es = s;
    es.periodic_y = true;
    out.fam_ = ConnectionFamily{RetractionForm::analytic(es, eval), in.substeps};
    return out;
}

DressedFamily dress_family(const ConnectionFamily& fam, const DarbouxResult& result) {
    return DressedFamily::build(fam, result);
}

TangentField dual_frames(const RetractionForm& eta) {
    const GridShape& s = eta.shape();
    TangentField t{s, std::vector<Quat>(s.size()), std::vector<Quat>(s.size())};
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            t.fx[s.idx(ix, iy)] = eta.omega(ix, iy, Dir::X);
            t.fy[s.idx(ix, iy)] = eta.omega(ix, iy, Dir::Y);
        }
    return t;
}

SurfaceGrid dual_from_form(const RetractionForm& eta, const Quat& anchor) {
    const GridShape& s = eta.shape();
    std::vector<Quat> wx(s.size()), wy(s.size());
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            wx[s.idx(ix, iy)] = eta.omega(ix, iy, Dir::X);
            wy[s.idx(ix, iy)] = eta.omega(ix, iy, Dir::Y);
        }
    SurfaceGrid dual{s, std::vector<Quat>(s.size())};
    dual.at(0, 0) = anchor;
    const double hx = s.hx(), hy = s.hy();
    for (int ix = 1; ix < s.nx; ++ix)
        dual.at(ix, 0) = dual.at(ix - 1, 0) + (wx[s.idx(ix - 1, 0)] + wx[s.idx(ix, 0)]) * (0.5 * hx);
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 1; iy < s.rows(); ++iy)
            dual.at(ix, iy) =
                dual.at(ix, iy - 1) + (wy[s.idx(ix, iy - 1)] + wy[s.idx(ix, iy)]) * (0.5 * hy);

    double wscale = 0;
    for (long i = 0; i < s.size(); ++i) wscale = std::max({wscale, wx[i].norm(), wy[i].norm()});
    double closure = 0;
    for (int ix = 0; ix < s.nx; ++ix) {
        Quat loop{};
        for (int iy = 0; iy < s.ny; ++iy) {
            const Quat& w0 = wy[s.idx(ix, iy)];
            const Quat& w1 = wy[s.idx(ix, (iy + 1) % s.rows())];
            loop += (w0 + w1) * (0.5 * hy);
        }
        closure = std::max(closure, loop.norm());
    }
    dual.shape.periodic_y = closure < 1e-6 * std::max(1.0, wscale);
    return dual;
}

}  // namespace isodt
