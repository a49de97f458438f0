#include "isodt/connection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace isodt {

namespace {

constexpr double kClusterGap = 1e-6;     // relative eigenvalue clustering gap
constexpr double kRankThreshold = 1e-8;  // relative SVD threshold for Jordan detection
// A defective eigenvalue splits by sqrt(transport error) under the numeric
// holonomy, far beyond kClusterGap; clusters this close are one eigenvalue.
constexpr double kCoalesceGap = 1e-3;

HEndo2 eta_entry(const Quat& f, const Quat& w) {
    return {f * w, -(f * w * f), w, -(w * f)};
}

// Lagrange weights for npts consecutive nodes; u is measured from the
// window start in node units.
void lagrange_weights(double u, int npts, double* wgt) {
    for (int k = 0; k < npts; ++k) {
        double w = 1.0;
        for (int m = 0; m < npts; ++m) {
            if (m == k) continue;
            w *= (u - m) / (k - m);
        }
        wgt[k] = w;
    }
}

}  // namespace

RetractionForm RetractionForm::from_samples(GridShape shape, std::vector<HEndo2> ex,
                                            std::vector<HEndo2> ey) {
    if (static_cast<long>(ex.size()) != shape.size() ||
        static_cast<long>(ey.size()) != shape.size())
        throw Error("retraction form: sample count mismatch");
    RetractionForm r;
    r.shape_ = shape;
    r.ex_ = std::move(ex);
    r.ey_ = std::move(ey);
    return r;
}

RetractionForm RetractionForm::from_surfaces(const SurfaceGrid& f, const SurfaceGrid& fd) {
    if (!f.shape.same_sampling(fd.shape)) throw Error("build_eta: shape mismatch");
    // the dual differential is sampled once; 6th-order stencils keep the
    // discrete family's flatness defect below the transport error
    TangentField td{fd.shape, diff_x(fd.shape, fd.f, 6), diff_y(fd.shape, fd.f, 6)};
    std::vector<HEndo2> ex(f.shape.size()), ey(f.shape.size());
    for (long i = 0; i < f.shape.size(); ++i) {
        ex[i] = eta_entry(f.f[i], td.fx[i]);
        ey[i] = eta_entry(f.f[i], td.fy[i]);
    }
    GridShape s = f.shape;
    s.periodic_y = f.shape.periodic_y && fd.shape.periodic_y;
    return from_samples(s, std::move(ex), std::move(ey));
}

RetractionForm RetractionForm::analytic(GridShape shape, Analytic eval) {
    RetractionForm r;
    r.shape_ = shape;
    r.eval_ = std::move(eval);
    return r;
}

HEndo2 RetractionForm::at(int ix, int iy, Dir dir) const {
    if (eval_) return eval_(shape_.xat(ix), shape_.yat(iy), dir);
    return dir == Dir::X ? ex_[shape_.idx(ix, iy)] : ey_[shape_.idx(ix, iy)];
}

void RetractionForm::set_interpolation_points(int npts) {
    if (npts < 2 || npts > 6) throw Error("interpolation window must have 2..6 nodes");
    interp_points_ = npts;
}

HEndo2 RetractionForm::on_line(Dir dir, int fixed_index, double coord) const {
    if (eval_) {
        return dir == Dir::X ? eval_(coord, shape_.yat(fixed_index), dir)
                             : eval_(shape_.xat(fixed_index), coord, dir);
    }
    const std::vector<HEndo2>& data = dir == Dir::X ? ex_ : ey_;
    const int n = dir == Dir::X ? shape_.nx : shape_.rows();
    const double h = dir == Dir::X ? shape_.hx() : shape_.hy();
    const double origin = dir == Dir::X ? shape_.x0 : 0.0;
    const bool periodic = dir == Dir::Y && shape_.periodic_y;

    const double u = (coord - origin) / h;
    const int npts = std::min(interp_points_, n >= 6 ? 6 : (n >= 4 ? 4 : 2));
    double wgt[6];
    HEndo2 out{};
    auto sample = [&](int i) -> const HEndo2& {
        const int iw = periodic ? ((i % n) + n) % n : i;
        return dir == Dir::X ? data[shape_.idx(iw, fixed_index)]
                             : data[shape_.idx(fixed_index, iw)];
    };
    int i0 = static_cast<int>(std::floor(u)) - (npts / 2 - 1);
    if (!periodic) i0 = std::clamp(i0, 0, n - npts);
    lagrange_weights(u - i0, npts, wgt);
    for (int k = 0; k < npts; ++k) out = out + sample(i0 + k) * wgt[k];
    return out;
}

double RetractionForm::structure_residual(const SurfaceGrid& f) const {
    double worst = 0;
    const HVec2 e{kOne, Quat{}};
    for (int ix = 0; ix < shape_.nx; ++ix) {
        for (int iy = 0; iy < shape_.rows(); ++iy) {
            const HVec2 psi{f.at(ix, iy), kOne};
            for (Dir dir : {Dir::X, Dir::Y}) {
                const HEndo2 E = at(ix, iy, dir);
                const double scale = std::max(1e-300, E.norm());
                worst = std::max(worst, (E * E).norm() / (scale * scale));
                worst = std::max(worst, (E * psi).norm() / (scale * psi.norm()));
                const HVec2 img = E * e;
                worst = std::max(worst, (img.top - f.at(ix, iy) * img.bottom).norm() / scale);
            }
        }
    }
    return worst;
}

ConnectionFamily make_family(const SurfaceGrid& f, const SurfaceGrid& fd, int substeps) {
    return ConnectionFamily{RetractionForm::from_surfaces(f, fd), substeps};
}

SectionField SectionField::operator*(const Quat& q) const {
    SectionField out = *this;
    for (HVec2& v : out.vals) v = v * q;
    for (HVec2& v : out.closure) v = v * q;
    out.multiplier.reset();
    return out;
}

namespace {

SectionField combine(const SectionField& a, const SectionField& b, double sign) {
    if (!a.shape.same_sampling(b.shape)) throw Error("section field shape mismatch");
    SectionField out = a;
    for (int ix = 0; ix < a.shape.nx; ++ix)
        for (int iy = 0; iy < a.shape.rows(); ++iy)
            out.vals[a.shape.idx(ix, iy)] = a.at(ix, iy) + b.at(ix, iy) * sign;
    out.col_scale.assign(a.shape.nx, 1.0);
    if (a.has_closure() && b.has_closure())
        for (int ix = 0; ix < a.shape.nx; ++ix)
            out.closure[ix] = a.closure_at(ix) + b.closure_at(ix) * sign;
    else
        out.closure.clear();
    out.multiplier.reset();
    return out;
}

}  // namespace

SectionField SectionField::operator-(const SectionField& o) const { return combine(*this, o, -1.0); }
SectionField SectionField::operator+(const SectionField& o) const { return combine(*this, o, +1.0); }

HVec2 transport_edge(const ConnectionFamily& fam, double lambda, const HVec2& start,
                     int ix, int iy, Dir dir, bool forward, int substeps_override) {
    const GridShape& s = fam.eta.shape();
    const int ns = substeps_override > 0 ? substeps_override : fam.substeps;
    const double h = dir == Dir::X ? s.hx() : s.hy();
    const int fixed = dir == Dir::X ? iy : ix;
    const double c0 = dir == Dir::X ? s.xat(ix) : s.yat(iy);
    const double dt = (forward ? h : -h) / ns;

    HVec2 v = start;
    double t = c0;
    auto rhs = [&](double tc, const HVec2& u) -> HVec2 {
        return (fam.eta.on_line(dir, fixed, tc) * u) * (-lambda);
    };
    for (int step = 0; step < ns; ++step) {
        const HVec2 k1 = rhs(t, v);
        const HVec2 k2 = rhs(t + dt / 2, v + k1 * (dt / 2));
        const HVec2 k3 = rhs(t + dt / 2, v + k2 * (dt / 2));
        const HVec2 k4 = rhs(t + dt, v + k3 * dt);
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        t += dt;
    }
    return v;
}

HEndo2 transport_edge_endo(const ConnectionFamily& fam, double lambda, int ix, int iy, Dir dir,
                           bool forward, int substeps_override) {
    const HVec2 c1 = transport_edge(fam, lambda, HVec2{kOne, Quat{}}, ix, iy, dir, forward,
                                    substeps_override);
    const HVec2 c2 = transport_edge(fam, lambda, HVec2{Quat{}, kOne}, ix, iy, dir, forward,
                                    substeps_override);
    return {c1.top, c2.top, c1.bottom, c2.bottom};
}

HVec2 parallel_transport(const ConnectionFamily& fam, double lambda, const HVec2& start,
                         int ix, int iy, const std::vector<PathStep>& path) {
    const GridShape& s = fam.eta.shape();
    HVec2 v = start;
    for (const PathStep& step : path) {
        const bool fwd = step.sign > 0;
        const int from_ix = ix, from_iy = iy;
        if (step.dir == Dir::X) ix += step.sign; else iy += step.sign;
        if (ix < 0 || ix >= s.nx) throw Error("path leaves the grid in x");
        if (!s.periodic_y && (iy < 0 || iy >= s.rows())) throw Error("path leaves the grid in y");
        const int eiy = step.dir == Dir::Y && s.periodic_y
                            ? ((from_iy % s.rows()) + s.rows()) % s.rows()
                            : from_iy;
        v = transport_edge(fam, lambda, v, from_ix, eiy, step.dir, fwd);
    }
    return v;
}

SectionField integrate_section(const ConnectionFamily& fam, double lambda, const HVec2& seed,
                               IntegrationOrder order) {
    if (seed.norm() <= 0) throw Error("integrate_section: zero seed");
    const GridShape& s = fam.eta.shape();
    SectionField out;
    out.shape = s;
    out.lambda = lambda;
    out.vals.assign(s.size(), HVec2{});
    out.col_scale.assign(s.nx, 1.0);
    out.closure.assign(s.nx, HVec2{});

    if (order == IntegrationOrder::RowThenColumns) {
        out.vals[s.idx(0, 0)] = seed;
        for (int ix = 1; ix < s.nx; ++ix)
            out.vals[s.idx(ix, 0)] =
                transport_edge(fam, lambda, out.vals[s.idx(ix - 1, 0)], ix - 1, 0, Dir::X);
        for (int ix = 0; ix < s.nx; ++ix)
            for (int iy = 1; iy < s.rows(); ++iy)
                out.vals[s.idx(ix, iy)] =
                    transport_edge(fam, lambda, out.vals[s.idx(ix, iy - 1)], ix, iy - 1, Dir::Y);
    } else {
        out.vals[s.idx(0, 0)] = seed;
        for (int iy = 1; iy < s.rows(); ++iy)
            out.vals[s.idx(0, iy)] =
                transport_edge(fam, lambda, out.vals[s.idx(0, iy - 1)], 0, iy - 1, Dir::Y);
        for (int iy = 0; iy < s.rows(); ++iy)
            for (int ix = 1; ix < s.nx; ++ix)
                out.vals[s.idx(ix, iy)] =
                    transport_edge(fam, lambda, out.vals[s.idx(ix - 1, iy)], ix - 1, iy, Dir::X);
    }
    for (int ix = 0; ix < s.nx; ++ix)
        out.closure[ix] =
            transport_edge(fam, lambda, out.vals[s.idx(ix, s.rows() - 1)], ix, s.rows() - 1, Dir::Y);

    // column normalisation by the seed-row norm, factor kept
    for (int ix = 0; ix < s.nx; ++ix) {
        const double nrm = out.vals[s.idx(ix, 0)].norm();
        if (nrm <= 0) throw Error("integrate_section: section collapsed");
        out.col_scale[ix] = nrm;
        const double inv = 1.0 / nrm;
        for (int iy = 0; iy < s.rows(); ++iy) out.vals[s.idx(ix, iy)] = out.vals[s.idx(ix, iy)] * inv;
        out.closure[ix] = out.closure[ix] * inv;
    }
    return out;
}

double parallelism_residual(const ConnectionFamily& fam, double lambda,
                            const SectionField& phi, int refine) {
    const GridShape& s = phi.shape;
    const int ns = fam.substeps * refine;
    double worst = 0;
    auto defect = [&](const HVec2& a, const HVec2& b, int ix, int iy, Dir dir) {
        const HVec2 fine = transport_edge(fam, lambda, a, ix, iy, dir, true, ns);
        worst = std::max(worst, (b - fine).norm() / std::max(1e-300, b.norm()));
    };
    for (int ix = 0; ix < s.nx; ++ix) {
        for (int iy = 0; iy + 1 < s.rows(); ++iy)
            defect(phi.at(ix, iy), phi.at(ix, iy + 1), ix, iy, Dir::Y);
        if (phi.has_closure())
            defect(phi.at(ix, s.rows() - 1), phi.closure_at(ix), ix, s.rows() - 1, Dir::Y);
    }
    for (int iy = 0; iy < s.rows(); ++iy)
        for (int ix = 0; ix + 1 < s.nx; ++ix)
            defect(phi.at(ix, iy), phi.at(ix + 1, iy), ix, iy, Dir::X);
    return worst;
}

double curvature_residual(const ConnectionFamily& fam, double lambda) {
    const GridShape& s = fam.eta.shape();
    const double area = s.hx() * s.hy();
    const int ylim = s.periodic_y ? s.rows() : s.rows() - 1;

    std::vector<HEndo2> ux(static_cast<size_t>(s.nx - 1) * s.rows());
    auto uxid = [&](int ix, int iy) { return static_cast<size_t>(ix) * s.rows() + iy; };
    for (int ix = 0; ix + 1 < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy)
            ux[uxid(ix, iy)] = transport_edge_endo(fam, lambda, ix, iy, Dir::X);
    std::vector<HEndo2> uy(static_cast<size_t>(s.nx) * ylim);
    auto uyid = [&](int ix, int iy) { return static_cast<size_t>(ix) * ylim + iy; };
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < ylim; ++iy)
            uy[uyid(ix, iy)] = transport_edge_endo(fam, lambda, ix, iy, Dir::Y);

    double worst = 0;
    for (int ix = 0; ix + 1 < s.nx; ++ix) {
        for (int iy = 0; iy < ylim; ++iy) {
            const int iy1 = (iy + 1) % s.rows();
            const HEndo2 a = uy[uyid(ix + 1, iy)] * ux[uxid(ix, iy)];
            const HEndo2 b = ux[uxid(ix, iy1)] * uy[uyid(ix, iy)];
            worst = std::max(worst, (a - b).norm() / area);
        }
    }
    return worst;
}

double curvature_form_residual(const ConnectionFamily& fam, double lambda) {
    const GridShape& s = fam.eta.shape();
    const double hx = s.hx(), hy = s.hy(), area = hx * hy;
    const int ylim = s.periodic_y ? s.rows() : s.rows() - 1;
    double worst = 0;
    for (int ix = 0; ix + 1 < s.nx; ++ix) {
        for (int iy = 0; iy < ylim; ++iy) {
            const int iy1 = (iy + 1) % s.rows();
            const HEndo2 x00 = fam.eta.at(ix, iy, Dir::X), x10 = fam.eta.at(ix + 1, iy, Dir::X);
            const HEndo2 x01 = fam.eta.at(ix, iy1, Dir::X), x11 = fam.eta.at(ix + 1, iy1, Dir::X);
            const HEndo2 y00 = fam.eta.at(ix, iy, Dir::Y), y10 = fam.eta.at(ix + 1, iy, Dir::Y);
            const HEndo2 y01 = fam.eta.at(ix, iy1, Dir::Y), y11 = fam.eta.at(ix + 1, iy1, Dir::Y);
            const HEndo2 circ = (x00 + x10) * (0.5 * hx) + (y10 + y11) * (0.5 * hy) -
                                (x01 + x11) * (0.5 * hx) - (y00 + y01) * (0.5 * hy);
            const HEndo2 ax = (x00 + x10 + x01 + x11) * 0.25;
            const HEndo2 ay = (y00 + y10 + y01 + y11) * 0.25;
            const HEndo2 F = circ * lambda + (ax * ay - ay * ax) * (lambda * lambda * area);
            worst = std::max(worst, F.norm() / area);
        }
    }
    return worst;
}

HEndo2 holonomy(const ConnectionFamily& fam, double lambda, double x) {
    const GridShape& s = fam.eta.shape();
    const int ix = std::clamp(static_cast<int>(std::lround((x - s.x0) / s.hx())), 0, s.nx - 1);
    HVec2 c1{kOne, Quat{}}, c2{Quat{}, kOne};
    for (int iy = 0; iy < s.ny; ++iy) {
        const int wrapped = iy % s.rows();
        c1 = transport_edge(fam, lambda, c1, ix, wrapped, Dir::Y);
        c2 = transport_edge(fam, lambda, c2, ix, wrapped, Dir::Y);
    }
    return {c1.top, c2.top, c1.bottom, c2.bottom};
}

namespace {

struct Cluster {
    Complex mean;
    int count = 0;
    double spread = 0;  // eigenvalue scatter, sets the rank-test floor
};

std::vector<Cluster> cluster_eigenvalues(const std::vector<Complex>& ev) {
    std::vector<Complex> sorted = ev;
    std::sort(sorted.begin(), sorted.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    double scale = 1.0;
    for (Complex v : sorted) scale = std::max(scale, std::abs(v));
    std::vector<Cluster> out;
    for (Complex v : sorted) {
        bool placed = false;
        for (Cluster& c : out) {
            if (std::abs(v - c.mean) <= kClusterGap * scale) {
                c.mean = (c.mean * static_cast<double>(c.count) + v) / static_cast<double>(c.count + 1);
                ++c.count;
                c.spread = std::max(c.spread, std::abs(v - c.mean));
                placed = true;
                break;
            }
        }
        if (!placed) out.push_back({v, 1, 0.0});
    }
    return out;
}

int rank_of(const ComplexMatrix4& M, double threshold) {
    Eigen::JacobiSVD<ComplexMatrix4> svd(M);
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (svd.singularValues()(i) > threshold) ++rank;
    return rank;
}

HVec2 kernel_seed(const ComplexMatrix4& M, Complex h) {
    Eigen::JacobiSVD<ComplexMatrix4> svd(M - h * ComplexMatrix4::Identity(),
                                         Eigen::ComputeFullV);
    ComplexVector4 v = svd.matrixV().col(3);  // smallest singular direction
    // deterministic phase: largest component real positive
    int imax = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    if (std::abs(v(imax)) > 0) v *= std::conj(v(imax)) / std::abs(v(imax));
    HVec2 q = decomplexify(v);
    return q * (1.0 / q.norm());
}

}  // namespace

MultiplierSet multipliers(const ConnectionFamily& fam, double lambda, double x) {
    MultiplierSet out;
    out.hol = holonomy(fam, lambda, x);
    const ComplexMatrix4 M = complexify(out.hol);
    Eigen::ComplexEigenSolver<ComplexMatrix4> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        out.ill_conditioned = true;
        return out;
    }
    out.raw_eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    const double mscale = M.norm();

    std::vector<Cluster> clusters = cluster_eigenvalues(out.raw_eigenvalues);
    if (clusters.size() > 1) {
        double spread = 0, mscale2 = 1.0;
        Complex mean{};
        for (Complex v : out.raw_eigenvalues) {
            mean += v;
            mscale2 = std::max(mscale2, std::abs(v));
            for (Complex w : out.raw_eigenvalues) spread = std::max(spread, std::abs(v - w));
        }
        if (spread <= kCoalesceGap * mscale2) clusters = {{mean / 4.0, 4, spread}};
    }
    // defective iff kernel of (M - h I) is smaller than the cluster; the
    // rank-test floor must sit above the eigenvalue scatter
    for (const Cluster& c : clusters) {
        const double floor = std::max(kRankThreshold * mscale, 10.0 * c.spread);
        const int rank = rank_of(M - c.mean * ComplexMatrix4::Identity(), floor);
        if (rank > 4 - c.count) out.defective = true;
    }
    // merge conjugate clusters; representative with Im h >= 0
    std::vector<bool> used(clusters.size(), false);
    double scale = 1.0;
    for (const Cluster& c : clusters) scale = std::max(scale, std::abs(c.mean));
    for (size_t i = 0; i < clusters.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        MultiplierPair pair;
        pair.h = clusters[i].mean;
        pair.multiplicity = clusters[i].count;
        for (size_t j = i + 1; j < clusters.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(std::conj(clusters[j].mean) - clusters[i].mean) <= kClusterGap * scale) {
                pair.multiplicity += clusters[j].count;
                used[j] = true;
                break;
            }
        }
        if (pair.h.imag() < 0) pair.h = std::conj(pair.h);
        pair.seed = kernel_seed(M, pair.h);
        out.pairs.push_back(pair);
    }
    std::sort(out.pairs.begin(), out.pairs.end(), [](const MultiplierPair& a, const MultiplierPair& b) {
        if (a.h.real() != b.h.real()) return a.h.real() < b.h.real();
        return a.h.imag() < b.h.imag();
    });
    return out;
}

std::string to_string(SpectrumClass c) {
    switch (c) {
        case SpectrumClass::DefectiveReal: return "defective-real";
        case SpectrumClass::TwoReal: return "two-real";
        case SpectrumClass::CirclePair: return "circle-pair";
        case SpectrumClass::Resonance: return "resonance";
        case SpectrumClass::FourDistinct: return "four-distinct";
    }
    return "?";
}

SpectrumRecord classify_spectrum(const ConnectionFamily& fam, double lambda, double x) {
    const MultiplierSet ms = multipliers(fam, lambda, x);
    SpectrumRecord rec{};
    rec.defective = ms.defective;
    rec.ill_conditioned = ms.ill_conditioned;
    if (ms.ill_conditioned) throw Error("classify_spectrum: eigenproblem failed");
    const ComplexMatrix4 M = complexify(ms.hol);

    int real_entries = 0, nonreal_entries = 0;
    for (const MultiplierPair& p : ms.pairs) {
        const bool realh = std::abs(p.h.imag()) <= kClusterGap * std::max(1.0, std::abs(p.h));
        (realh ? real_entries : nonreal_entries) += 1;
    }
    rec.h1 = ms.pairs[0].h;
    rec.h2 = ms.pairs.size() > 1 ? ms.pairs[1].h : ms.pairs[0].h;

    if (ms.pairs.size() == 1 && ms.pairs[0].multiplicity == 4 && real_entries == 1) {
        double spread = 0;
        for (Complex v : ms.raw_eigenvalues)
            spread = std::max(spread, std::abs(v - ms.pairs[0].h));
        rec.eigenspace_rank = rank_of(M - ms.pairs[0].h * ComplexMatrix4::Identity(),
                                      std::max(kRankThreshold * M.norm(), 10.0 * spread));
        rec.cls = rec.defective ? SpectrumClass::DefectiveReal : SpectrumClass::Resonance;
        return rec;
    }
    if (real_entries == 2 && nonreal_entries == 0) {
        rec.cls = SpectrumClass::TwoReal;
        return rec;
    }
    if (nonreal_entries == 1 && real_entries == 0) {
        rec.cls = SpectrumClass::CirclePair;
        return rec;
    }
    rec.cls = SpectrumClass::FourDistinct;
    return rec;
}

std::pair<Complex, double> multiplier_fit(const HVec2& start, const HVec2& end) {
    const ComplexVector4 v = complexify(start), w = complexify(end);
    const Complex h = v.dot(w) / v.dot(v);  // Eigen dot conjugates the first argument
    const double res = (w - h * v).norm() / v.norm();
    return {h, res};
}

std::pair<Complex, double> section_multiplier(const ConnectionFamily& fam, const SectionField& phi) {
    const GridShape& s = phi.shape;
    // the value one full period above the last stored row, per column
    auto period_end = [&](int ix) {
        if (s.wraps >= 2 || phi.has_closure())
            return s.wraps >= 2 ? phi.at(ix, s.ny) : phi.closure_at(ix);
        return transport_edge(fam, phi.lambda, phi.at(ix, s.rows() - 1), ix, s.rows() - 1, Dir::Y);
    };
    auto [h, res0] = multiplier_fit(phi.at(0, 0), period_end(0));
    double worst = res0;
    for (int ix = 0; ix < s.nx; ++ix) {
        if (s.wraps >= 2) {
            Complex hk = h;
            for (int k = 1; k <= s.wraps; ++k, hk *= h) {
                const HVec2 ref = k < s.wraps ? phi.at(ix, k * s.ny) : phi.closure_at(ix);
                const ComplexVector4 a = complexify(phi.at(ix, 0)), b = complexify(ref);
                worst = std::max(worst, (b - hk * a).norm() / (std::abs(hk) * a.norm()));
            }
        } else {
            const ComplexVector4 a = complexify(phi.at(ix, 0)), b = complexify(period_end(ix));
            worst = std::max(worst, (b - h * a).norm() / (std::abs(h) * a.norm()));
        }
    }
    return {h, worst};
}

}  // namespace isodt
