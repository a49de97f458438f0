#include "isodt/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace isodt {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_mesh(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_grid_csv(const std::string& path, const SurfaceGrid& grid) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    const GridShape& s = grid.shape;
    out << "nx,ny,wraps,x0,x1,periodic_y\n";
    out << s.nx << ',' << s.ny << ',' << s.wraps << ',' << format_full(s.x0) << ','
        << format_full(s.x1) << ',' << (s.periodic_y ? 1 : 0) << '\n';
    out << "ix,iy,w,x,y,z\n";
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            const Quat& q = grid.at(ix, iy);
            out << ix << ',' << iy << ',' << format_full(q.w) << ',' << format_full(q.x) << ','
                << format_full(q.y) << ',' << format_full(q.z) << '\n';
        }
    if (!out) throw Error("write failed: " + path);
}

SurfaceGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("nx,", 0) != 0)
        throw Error("grid csv: missing header in " + path);
    if (!std::getline(in, line)) throw Error("grid csv: truncated header");
    GridShape s;
    int periodic = 1;
    {
        std::istringstream ss(line);
        char c;
        ss >> s.nx >> c >> s.ny >> c >> s.wraps >> c >> s.x0 >> c >> s.x1 >> c >> periodic;
        if (!ss) throw Error("grid csv: malformed header line");
    }
    s.periodic_y = periodic != 0;
    if (!std::getline(in, line) || line.rfind("ix,", 0) != 0)
        throw Error("grid csv: missing column header");
    SurfaceGrid grid{s, std::vector<Quat>(s.size())};
    long count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        char c;
        int ix, iy;
        Quat q;
        ss >> ix >> c >> iy >> c >> q.w >> c >> q.x >> c >> q.y >> c >> q.z;
        if (!ss) throw Error("grid csv: malformed row");
        if (ix < 0 || ix >= s.nx || iy < 0 || iy >= s.rows()) throw Error("grid csv: index out of range");
        grid.at(ix, iy) = q;
        ++count;
    }
    if (count != s.size()) throw Error("grid csv: sample count mismatch");
    return grid;
}

void write_obj(const std::string& path, const SurfaceGrid& grid,
               const std::vector<unsigned char>* mask, double weld_tol) {
    const GridShape& s = grid.shape;
    if (grid.max_real_part() > 1e-6 * std::max(1.0, grid.scale()))
        throw Error("obj export expects an R^3 (imaginary) surface");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "# surface grid " << s.nx << " x " << s.rows() << "\n";
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.rows(); ++iy) {
            const Quat& q = grid.at(ix, iy);
            out << "v " << format_mesh(q.x) << ' ' << format_mesh(q.y) << ' '
                << format_mesh(q.z) << '\n';
        }
    const bool weld =
        s.periodic_y && grid.periodicity_residual() <= weld_tol * std::max(1.0, grid.scale());
    const int ylim = weld ? s.rows() : s.rows() - 1;
    auto vid = [&](int ix, int iy) { return 1 + ix * s.rows() + (iy % s.rows()); };
    for (int ix = 0; ix + 1 < s.nx; ++ix)
        for (int iy = 0; iy < ylim; ++iy)
            out << "f " << vid(ix, iy) << ' ' << vid(ix + 1, iy) << ' ' << vid(ix + 1, iy + 1)
                << ' ' << vid(ix, iy + 1) << '\n';
    if (!out) throw Error("write failed: " + path);

    if (mask) {
        bool any = false;
        for (unsigned char m : *mask)
            if (m) { any = true; break; }
        if (any) {
            std::ofstream mout(path + ".mask");
            mout << "ix,iy,flag\n";
            for (int ix = 0; ix < s.nx; ++ix)
                for (int iy = 0; iy < s.rows(); ++iy)
                    if ((*mask)[s.idx(ix, iy)])
                        mout << ix << ',' << iy << ',' << int((*mask)[s.idx(ix, iy)]) << '\n';
        }
    }
}

void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
}

}  // namespace isodt
