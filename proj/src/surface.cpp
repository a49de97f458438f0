#include "isodt/surface.hpp"

#include <algorithm>
#include <cmath>

namespace isodt {

double SurfaceGrid::scale() const {
    double s = 0;
    for (const Quat& q : f) s = std::max(s, q.norm());
    return s;
}

double SurfaceGrid::max_real_part() const {
    double s = 0;
    for (const Quat& q : f) s = std::max(s, std::abs(q.w));
    return s;
}

double SurfaceGrid::periodicity_residual() const {
    if (shape.wraps < 2) return 0.0;
    double r = 0;
    for (int ix = 0; ix < shape.nx; ++ix)
        for (int iy = 0; iy + shape.ny < shape.rows(); ++iy)
            r = std::max(r, (at(ix, iy) - at(ix, iy + shape.ny)).norm());
    return r;
}

namespace {

template <typename T>
T scaled(const T& v, double s);
template <>
Quat scaled(const Quat& v, double s) { return v * s; }
template <>
double scaled(const double& v, double s) { return v * s; }

// One-dimensional derivative along a line of n samples with spacing h.
// get(i) fetches the sample, put(i, v) stores the derivative. order is 4
// (default grid order) or 6 (diagnostics).
template <typename T, typename Get, typename Put>
void diff_line(int n, double h, bool periodic, Get get, Put put, int order = 4) {
    if (n < 4) throw Error("grid too small for differencing (need >= 4 nodes)");
    const double inv60h = 1.0 / (60.0 * h);
    const double inv12h = 1.0 / (12.0 * h);
    const double inv2h = 1.0 / (2.0 * h);
    auto wrap = [n](int i) { return ((i % n) + n) % n; };
    auto central6 = [&](auto at) {
        T v = scaled(at(3) - at(-3), 1.0) + scaled(at(-2) - at(2), 9.0) +
              scaled(at(1) - at(-1), 45.0);
        return scaled(v, inv60h);
    };

    if (periodic) {
        if (order >= 6 && n >= 7) {
            for (int i = 0; i < n; ++i)
                put(i, central6([&](int k) { return get(wrap(i + k)); }));
        } else if (n >= 5) {
            for (int i = 0; i < n; ++i) {
                T v = get(wrap(i - 2)) - get(wrap(i + 2)) +
                      scaled(get(wrap(i + 1)) - get(wrap(i - 1)), 8.0);
                put(i, scaled(v, inv12h));
            }
        } else {
            for (int i = 0; i < n; ++i)
                put(i, scaled(get(wrap(i + 1)) - get(wrap(i - 1)), inv2h));
        }
        return;
    }

    if (n >= 5) {
        for (int i = 2; i + 2 < n; ++i) {
            if (order >= 6 && i >= 3 && i + 3 < n) {
                put(i, central6([&](int k) { return get(i + k); }));
                continue;
            }
            T v = get(i - 2) - get(i + 2) + scaled(get(i + 1) - get(i - 1), 8.0);
            put(i, scaled(v, inv12h));
        }
        // 4th-order one-sided stencils at the boundary
        auto onesided = [&](int i0, int dir) {
            T v = scaled(get(i0), -25.0) + scaled(get(i0 + dir), 48.0) +
                  scaled(get(i0 + 2 * dir), -36.0) + scaled(get(i0 + 3 * dir), 16.0) +
                  scaled(get(i0 + 4 * dir), -3.0);
            put(i0, scaled(v, dir * inv12h));
        };
        auto offset1 = [&](int i0, int dir) {
            T v = scaled(get(i0 - dir), -3.0) + scaled(get(i0), -10.0) +
                  scaled(get(i0 + dir), 18.0) + scaled(get(i0 + 2 * dir), -6.0) +
                  scaled(get(i0 + 3 * dir), 1.0);
            put(i0, scaled(v, dir * inv12h));
        };
        onesided(0, +1);
        offset1(1, +1);
        onesided(n - 1, -1);
        offset1(n - 2, -1);
    } else {  // n == 4, 2nd order
        for (int i = 1; i + 1 < n; ++i)
            put(i, scaled(get(i + 1) - get(i - 1), inv2h));
        put(0, scaled(scaled(get(0), -3.0) + scaled(get(1), 4.0) - get(2), inv2h));
        put(n - 1, scaled(scaled(get(n - 1), 3.0) + scaled(get(n - 2), -4.0) + get(n - 3), inv2h));
    }
}

template <typename T>
std::vector<T> diff_x_impl(const GridShape& s, const std::vector<T>& field, int order = 4) {
    std::vector<T> out(field.size());
    for (int iy = 0; iy < s.rows(); ++iy) {
        diff_line<T>(s.nx, s.hx(), /*periodic=*/false,
                     [&](int i) { return field[s.idx(i, iy)]; },
                     [&](int i, const T& v) { out[s.idx(i, iy)] = v; }, order);
    }
    return out;
}

template <typename T>
std::vector<T> diff_y_impl(const GridShape& s, const std::vector<T>& field, int order = 4) {
    std::vector<T> out(field.size());
    for (int ix = 0; ix < s.nx; ++ix) {
        diff_line<T>(s.rows(), s.hy(), s.periodic_y,
                     [&](int i) { return field[s.idx(ix, i)]; },
                     [&](int i, const T& v) { out[s.idx(ix, i)] = v; }, order);
    }
    return out;
}

}  // namespace

std::vector<Quat> diff_x(const GridShape& s, const std::vector<Quat>& f, int order) { return diff_x_impl(s, f, order); }
std::vector<Quat> diff_y(const GridShape& s, const std::vector<Quat>& f, int order) { return diff_y_impl(s, f, order); }
std::vector<double> diff_x(const GridShape& s, const std::vector<double>& f, int order) { return diff_x_impl(s, f, order); }
std::vector<double> diff_y(const GridShape& s, const std::vector<double>& f, int order) { return diff_y_impl(s, f, order); }

TangentField discrete_diff(const SurfaceGrid& grid) {
    if (grid.shape.nx < 4 || grid.shape.rows() < 4) throw Error("grid too small");
    TangentField t{grid.shape, diff_x(grid.shape, grid.f), diff_y(grid.shape, grid.f)};
    const double eps = kSingularEps * std::max(1.0, grid.scale());
    for (long i = 0; i < grid.shape.size(); ++i)
        if (t.fx[i].norm() <= eps || t.fy[i].norm() <= eps)
            throw Error("grid is not an immersion: vanishing tangent");
    return t;
}

Quat gauss_map_at(const Quat& fx, const Quat& fy, double tol) {
    const Quat n = fy * fx.inv(fx.norm());
    const double mag = n.norm();
    const double residual = std::abs(n.w) + std::abs(mag - 1.0);
    if (residual > tol * std::max(1.0, mag))
        throw Error("non-conformal frame in gauss_map");
    Quat ni = n.im();
    return ni * (1.0 / ni.norm());
}

std::vector<Quat> gauss_map(const TangentField& frames, double tol) {
    std::vector<Quat> N(frames.fx.size());
    for (size_t i = 0; i < N.size(); ++i) N[i] = gauss_map_at(frames.fx[i], frames.fy[i], tol);
    return N;
}

std::vector<Quat> gauss_map(const SurfaceGrid& grid, double tol) {
    if (grid.max_real_part() > 1e-6 * std::max(1.0, grid.scale()))
        throw Error("gauss_map requires an R^3-valued (imaginary) surface");
    return gauss_map(discrete_diff(grid), tol);
}

std::vector<double> mean_curvature(const GridShape& shape, const TangentField& t,
                                   double conformal_tol) {
    const std::vector<Quat> N = gauss_map(t, conformal_tol);
    const std::vector<Quat> Nx = diff_x(shape, N);
    const std::vector<Quat> Ny = diff_y(shape, N);
    std::vector<double> H(N.size());
    for (size_t i = 0; i < N.size(); ++i) {
        // -H f_x = (N_x - N N_y)/2
        const Quat hx = (Nx[i] - N[i] * Ny[i]) * t.fx[i].inv(t.fx[i].norm()) * (-0.5);
        H[i] = hx.re();
    }
    return H;
}

std::vector<double> mean_curvature(const SurfaceGrid& grid) {
    if (grid.max_real_part() > 1e-6 * std::max(1.0, grid.scale()))
        throw Error("mean_curvature requires an R^3-valued (imaginary) surface");
    return mean_curvature(grid.shape, discrete_diff(grid));
}

SurfaceGrid christoffel_dual(const SurfaceGrid& grid, const Quat& anchor, double closedness_tol) {
    const GridShape& s = grid.shape;
    const TangentField t = discrete_diff(grid);
    std::vector<Quat> wx(s.size()), wy(s.size());
    double wscale = 0;
    for (long i = 0; i < s.size(); ++i) {
        wx[i] = t.fx[i].inv(t.fx[i].norm());
        wy[i] = -t.fy[i].inv(t.fy[i].norm());
        wscale = std::max({wscale, wx[i].norm(), wy[i].norm()});
    }
    const double closed = closedness_residual(s, wx, wy);
    if (closed > closedness_tol * wscale)
        throw Error("christoffel_dual: omega is not closed (input not isothermic in these coordinates)");

    SurfaceGrid dual{s, std::vector<Quat>(s.size())};
    dual.at(0, 0) = anchor;
    const double hx = s.hx(), hy = s.hy();
    for (int ix = 1; ix < s.nx; ++ix)
        dual.at(ix, 0) = dual.at(ix - 1, 0) + (wx[s.idx(ix - 1, 0)] + wx[s.idx(ix, 0)]) * (0.5 * hx);
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 1; iy < s.rows(); ++iy)
            dual.at(ix, iy) =
                dual.at(ix, iy - 1) + (wy[s.idx(ix, iy - 1)] + wy[s.idx(ix, iy)]) * (0.5 * hy);

    // closure over one full y-period decides periodicity of the result
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

double conformality_residual(const SurfaceGrid& grid) {
    // 6th-order frames: the bound is dominated by |f_y|^2 cancellation
    TangentField t{grid.shape, diff_x_impl(grid.shape, grid.f, 6),
                   diff_y_impl(grid.shape, grid.f, 6)};
    double r = 0;
    for (size_t i = 0; i < t.fx.size(); ++i) {
        const double a = t.fx[i].norm2(), b = t.fy[i].norm2();
        r = std::max(r, (std::abs(a - b) + std::abs(dot(t.fx[i], t.fy[i]))) / a);
    }
    return r;
}

double closedness_residual(const GridShape& s, const std::vector<Quat>& wx,
                           const std::vector<Quat>& wy) {
    const double hx = s.hx(), hy = s.hy(), area = hx * hy;
    double r = 0;
    const int ylim = s.periodic_y ? s.rows() : s.rows() - 1;
    for (int ix = 0; ix + 1 < s.nx; ++ix) {
        for (int iy = 0; iy < ylim; ++iy) {
            const int iy1 = (iy + 1) % s.rows();
            const Quat c = (wx[s.idx(ix, iy)] + wx[s.idx(ix + 1, iy)]) * (0.5 * hx) +
                           (wy[s.idx(ix + 1, iy)] + wy[s.idx(ix + 1, iy1)]) * (0.5 * hy) -
                           (wx[s.idx(ix, iy1)] + wx[s.idx(ix + 1, iy1)]) * (0.5 * hx) -
                           (wy[s.idx(ix, iy)] + wy[s.idx(ix, iy1)]) * (0.5 * hy);
            r = std::max(r, c.norm() / area);
        }
    }
    return r;
}

double wedge_residual(const SurfaceGrid& f, const SurfaceGrid& fd) {
    if (!f.shape.same_sampling(fd.shape)) throw Error("wedge_residual: shape mismatch");
    const TangentField tf = discrete_diff(f);
    const TangentField td = discrete_diff(fd);
    double r = 0;
    for (long i = 0; i < f.shape.size(); ++i) {
        // (omega ^ df)(dx, dy) = w_x f_y - w_y f_x, evaluated at nodes
        const Quat v = td.fx[i] * tf.fy[i] - td.fy[i] * tf.fx[i];
        r = std::max(r, v.norm());
    }
    return r;
}

}  // namespace isodt
