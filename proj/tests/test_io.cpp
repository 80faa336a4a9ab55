#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "vesicle/driver.hpp"
#include "vesicle/io.hpp"

using namespace vesicle;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("vesicle_io_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() { fs::remove_all(path); }
};

Field wavy_field(const GridSpec& g) {
    Field f(g);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f.at(i, j, k) = std::sin(2.0 * M_PI * i / g.nx) * std::cos(2.0 * M_PI * j / g.ny) +
                                0.25 * std::sin(2.0 * M_PI * k / g.nz);
    return f;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("raw snapshots round-trip bit exactly") {
    ScratchDir d("raw");
    GridSpec g = cube_grid(16);
    Field f = wavy_field(g);
    write_raw(d.path / "f.raw", f);

    CHECK(fs::file_size(d.path / "f.raw") == 16u * 16u * 16u * sizeof(double));

    Field back = read_raw(d.path / "f.raw", g);
    REQUIRE(back.values.size() == f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) REQUIRE(back.values[i] == f.values[i]);
}

TEST_CASE("read_raw rejects size mismatches") {
    ScratchDir d("rawsize");
    GridSpec g = cube_grid(16);
    Field f = wavy_field(g);
    write_raw(d.path / "f.raw", f);

    // shorter grid's file read with the full grid: too short
    GridSpec small = cube_grid(8);
    Field fs_ = wavy_field(small);
    write_raw(d.path / "small.raw", fs_);
    CHECK_THROWS_AS(read_raw(d.path / "small.raw", g), IoError);

    // trailing garbage: too long
    {
        std::ofstream os(d.path / "long.raw", std::ios::binary);
        std::string all = slurp(d.path / "f.raw");
        os << all << 'x';
    }
    CHECK_THROWS_AS(read_raw(d.path / "long.raw", g), IoError);

    // missing file
    CHECK_THROWS_AS(read_raw(d.path / "absent.raw", g), IoError);
}

TEST_CASE("meta sidecar records grid, step, and layout") {
    ScratchDir d("meta");
    GridSpec g = cube_grid(16);
    SnapshotMeta m;
    m.step = 7;
    m.time = 3.5e-6;
    write_meta(d.path / "f.meta", g, m);
    std::string txt = slurp(d.path / "f.meta");
    CHECK(txt.find("format_version=1\n") != std::string::npos);
    CHECK(txt.find("nx=16\n") != std::string::npos);
    CHECK(txt.find("ny=16\n") != std::string::npos);
    CHECK(txt.find("nz=16\n") != std::string::npos);
    CHECK(txt.find("lx=1\n") != std::string::npos);
    CHECK(txt.find("step=7\n") != std::string::npos);
    auto tpos = txt.find("time=");
    REQUIRE(tpos != std::string::npos);
    CHECK(std::strtod(txt.c_str() + tpos + 5, nullptr) == 3.5e-6);
    CHECK(txt.find("dtype=float64-le\n") != std::string::npos);
    CHECK(txt.find("order=x-fastest\n") != std::string::npos);
}

TEST_CASE("vti snapshots carry the expected ImageData header and payload") {
    ScratchDir d("vti");
    GridSpec g = cube_grid(16);
    Field f = wavy_field(g);
    write_vti(d.path / "f.vti", f);
    std::string txt = slurp(d.path / "f.vti");
    CHECK(txt.find("<VTKFile type=\"ImageData\"") != std::string::npos);
    CHECK(txt.find("byte_order=\"LittleEndian\"") != std::string::npos);
    CHECK(txt.find("header_type=\"UInt64\"") != std::string::npos);
    CHECK(txt.find("WholeExtent=\"0 15 0 15 0 15\"") != std::string::npos);
    CHECK(txt.find("Spacing=\"0.0625 0.0625 0.0625\"") != std::string::npos);
    CHECK(txt.find("<DataArray type=\"Float64\" Name=\"phi\" format=\"binary\">") !=
          std::string::npos);
    CHECK(txt.find("</VTKFile>") != std::string::npos);
    // base64(8-byte size header + 16^3 doubles) = ceil(32776 / 3) * 4 characters
    CHECK(txt.size() > 43704);
}

TEST_CASE("write_snapshot honors the format list and rejects bad input") {
    ScratchDir d("snap");
    GridSpec g = cube_grid(8);
    Field f = wavy_field(g);
    SnapshotMeta m;
    m.step = 3;
    m.time = 1.5e-6;

    write_snapshot(d.path / "out", "state", f, m, {"raw", "vti"});
    CHECK(fs::exists(d.path / "out" / "state.raw"));
    CHECK(fs::exists(d.path / "out" / "state.meta"));
    CHECK(fs::exists(d.path / "out" / "state.vti"));

    CHECK_THROWS_AS(write_snapshot(d.path / "out", "state", f, m, {"png"}), IoError);

    Field bad = f;
    bad.values[10] = std::nan("");
    CHECK_THROWS_AS(write_snapshot(d.path / "out", "bad", bad, m, {"raw"}), IoError);
    CHECK_FALSE(fs::exists(d.path / "out" / "bad.raw"));
}

TEST_CASE("checkpoints round-trip field, step, and time") {
    ScratchDir d("ckpt");
    GridSpec g{12, 8, 10, 1.0, 1.5, 2.0};
    Field f = wavy_field(g);
    write_checkpoint(d.path / "cp", f, 4321, 4321 * 5e-7);

    CHECK(fs::exists(d.path / "cp" / "checkpoint.raw"));
    CHECK(fs::exists(d.path / "cp" / "checkpoint.json"));

    CheckpointData c = read_checkpoint(d.path / "cp");
    CHECK(c.step == 4321);
    CHECK(c.time == 4321 * 5e-7);
    CHECK(c.phi.grid.nx == 12);
    CHECK(c.phi.grid.ny == 8);
    CHECK(c.phi.grid.nz == 10);
    CHECK(c.phi.grid.ly == 1.5);
    REQUIRE(c.phi.values.size() == f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) REQUIRE(c.phi.values[i] == f.values[i]);
}

TEST_CASE("read_checkpoint reports missing or corrupt data as IoError") {
    ScratchDir d("ckptbad");
    CHECK_THROWS_AS(read_checkpoint(d.path / "nowhere"), IoError);

    fs::create_directories(d.path / "corrupt");
    std::ofstream(d.path / "corrupt" / "checkpoint.json") << "{not json";
    CHECK_THROWS_AS(read_checkpoint(d.path / "corrupt"), IoError);
}

TEST_CASE("diagnostics CSV rows round-trip at full precision") {
    ScratchDir d("diag");
    DiagnosticsRow row;
    row.step = 42;
    row.time = 42 * 5e-7;
    row.rate = 1.2345678901234567e-3;
    row.energy.E_M = 3.0303440585508347;
    row.energy.W = 2.5182156012386384;
    row.energy.G = 0.01837261094132;
    row.energy.T1 = 0.31415926535897931;
    row.energy.T2 = 0.17950858201989897;
    row.energy.V = 0.06751693206334218;
    row.energy.A = 0.78863995559651215;
    row.energy.dA = 0.08377446861679067;

    {
        DiagnosticsWriter w(d.path / "diag.csv");
        REQUIRE(w.is_open());
        w.write(row);
        w.flush();
    }
    std::string txt = slurp(d.path / "diag.csv");
    REQUIRE(txt.rfind("step,time,E_M,W,G,T1,T2,V,A,dA,rate\n", 0) == 0);

    std::string line = txt.substr(txt.find('\n') + 1);
    long step = 0;
    double vals[10];
    int got = std::sscanf(line.c_str(), "%ld,%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg", &step,
                          &vals[0], &vals[1], &vals[2], &vals[3], &vals[4], &vals[5], &vals[6],
                          &vals[7], &vals[8], &vals[9]);
    REQUIRE(got == 11);
    CHECK(step == row.step);
    CHECK(vals[0] == row.time);
    CHECK(vals[1] == row.energy.E_M);
    CHECK(vals[2] == row.energy.W);
    CHECK(vals[3] == row.energy.G);
    CHECK(vals[4] == row.energy.T1);
    CHECK(vals[5] == row.energy.T2);
    CHECK(vals[6] == row.energy.V);
    CHECK(vals[7] == row.energy.A);
    CHECK(vals[8] == row.energy.dA);
    CHECK(vals[9] == row.rate);
}
