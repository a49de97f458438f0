#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "isodt/cylinder.hpp"
#include "isodt/darboux.hpp"
#include "isodt/io.hpp"

using namespace isodt;

namespace {

GridShape shape(int nx, int ny, double x0 = -1, double x1 = 1, int wraps = 1) {
    GridShape s;
    s.nx = nx;
    s.ny = ny;
    s.wraps = wraps;
    s.x0 = x0;
    s.x1 = x1;
    s.periodic_y = true;
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("io_test_" + name) {}
    ~TempFile() {
        std::remove(path.c_str());
        std::remove((path + ".mask").c_str());
    }
};

}  // namespace

TEST_CASE("grid csv round-trips bit-exactly") {
    const GridShape s = shape(7, 12, -0.731, 1.618, 2);
    SurfaceGrid g = cyl::grid(s);
    g.at(3, 5) = Quat{1.0 / 3.0, -2.0e-17, 0.1 + 2e-16, 123456.789012345678};
    TempFile tmp("grid.csv");
    write_grid_csv(tmp.path, g);
    const SurfaceGrid back = read_grid_csv(tmp.path);
    REQUIRE(back.shape.nx == s.nx);
    REQUIRE(back.shape.ny == s.ny);
    REQUIRE(back.shape.wraps == s.wraps);
    CHECK(back.shape.x0 == s.x0);
    CHECK(back.shape.x1 == s.x1);
    CHECK(back.shape.periodic_y == s.periodic_y);
    for (long i = 0; i < s.size(); ++i) {
        CHECK(back.f[i].w == g.f[i].w);
        CHECK(back.f[i].x == g.f[i].x);
        CHECK(back.f[i].y == g.f[i].y);
        CHECK(back.f[i].z == g.f[i].z);
    }
}

TEST_CASE("csv reader rejects malformed input") {
    TempFile tmp("bad.csv");
    {
        std::ofstream out(tmp.path);
        out << "not,a,header\n";
    }
    CHECK_THROWS_AS((void)read_grid_csv(tmp.path), Error);
    CHECK_THROWS_AS((void)read_grid_csv("does_not_exist.csv"), Error);
}

TEST_CASE("obj export: vertex count, quad faces, welded seam") {
    const GridShape s = shape(5, 8);
    const SurfaceGrid g = cyl::grid(s);
    TempFile tmp("cyl.obj");
    write_obj(tmp.path, g);
    const std::string text = slurp(tmp.path);
    long vcount = 0, fcount = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) ++vcount;
        if (line.rfind("f ", 0) == 0) {
            ++fcount;
            int a, b, c, d;
            REQUIRE(std::sscanf(line.c_str(), "f %d %d %d %d", &a, &b, &c, &d) == 4);
            for (int v : {a, b, c, d}) {
                CHECK(v >= 1);
                CHECK(v <= vcount);
            }
        }
    }
    CHECK(vcount == s.size());
    CHECK(fcount == (s.nx - 1) * s.rows());  // seam welded: a full ring of quads
}

TEST_CASE("obj export: open seam when the grid does not close") {
    const GridShape s = shape(5, 8);
    SurfaceGrid g = cyl::grid(s);
    g.shape.periodic_y = false;
    TempFile tmp("open.obj");
    write_obj(tmp.path, g);
    std::istringstream in(slurp(tmp.path));
    std::string line;
    long fcount = 0;
    while (std::getline(in, line))
        if (line.rfind("f ", 0) == 0) ++fcount;
    CHECK(fcount == (s.nx - 1) * (s.rows() - 1));
}

TEST_CASE("obj export writes the singular-sample sidecar") {
    const GridShape s = shape(5, 8);
    const SurfaceGrid g = cyl::grid(s);
    std::vector<unsigned char> mask(s.size(), 0);
    mask[s.idx(2, 3)] = kMaskTouching;
    TempFile tmp("masked.obj");
    write_obj(tmp.path, g, &mask);
    const std::string sidecar = slurp(tmp.path + ".mask");
    CHECK(sidecar.find("2,3,1") != std::string::npos);
}

TEST_CASE("obj export rejects non-imaginary grids") {
    const GridShape s = shape(5, 8);
    SurfaceGrid g = cyl::grid(s);
    for (Quat& q : g.f) q.w = 1.0;
    TempFile tmp("real.obj");
    CHECK_THROWS_AS(write_obj(tmp.path, g), Error);
}

TEST_CASE("metadata sidecar preserves order") {
    TempFile tmp("meta.txt");
    write_metadata(tmp.path, {{"rho", "0.75"}, {"extension", "oracle"}, {"eps", "0.0001"}});
    const std::string text = slurp(tmp.path);
    CHECK(text == "rho = 0.75\nextension = oracle\neps = 0.0001\n");
}

TEST_CASE("number formatting") {
    CHECK(format_full(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_mesh(1.0 / 3.0) == "0.333333333");
    // round-trip
    CHECK(std::stod(format_full(M_PI)) == M_PI);
}
