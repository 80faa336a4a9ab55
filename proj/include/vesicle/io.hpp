#pragma once

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vesicle/grid.hpp"
#include "vesicle/version.hpp"

namespace vesicle {

static_assert(std::endian::native == std::endian::little,
              "raw snapshot format is little-endian; big-endian hosts unsupported");

struct SnapshotMeta {
    long step = 0;
    double time = 0.0;
};

/** Raw dump: 64-bit little-endian floats, x varying fastest. */
inline void write_raw(const std::filesystem::path& path, const Field& f) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os.write(reinterpret_cast<const char*>(f.values.data()),
             std::streamsize(f.values.size() * sizeof(double)));
    if (!os) throw IoError("short write: " + path.string());
}

inline Field read_raw(const std::filesystem::path& path, const GridSpec& g) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    Field f(g);
    is.read(reinterpret_cast<char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
    if (std::size_t(is.gcount()) != f.values.size() * sizeof(double))
        throw IoError("raw file shorter than grid: " + path.string());
    char extra;
    if (is.read(&extra, 1)) throw IoError("raw file longer than grid: " + path.string());
    return f;
}

/** Sidecar text metadata, one key=value per line. */
inline void write_meta(const std::filesystem::path& path, const GridSpec& g,
                       const SnapshotMeta& m) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "format_version=%d\nnx=%d\nny=%d\nnz=%d\nlx=%.17g\nly=%.17g\nlz=%.17g\n"
                  "step=%ld\ntime=%.17g\ndtype=float64-le\norder=x-fastest\n",
                  snapshot_format_version, g.nx, g.ny, g.nz, g.lx, g.ly, g.lz, m.step, m.time);
    os << buf;
    if (!os) throw IoError("short write: " + path.string());
}

namespace detail {

inline std::string base64(const unsigned char* data, std::size_t n) {
    static const char tab[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= n; i += 3) {
        unsigned v = unsigned(data[i]) << 16 | unsigned(data[i + 1]) << 8 | data[i + 2];
        out += tab[v >> 18];
        out += tab[(v >> 12) & 63];
        out += tab[(v >> 6) & 63];
        out += tab[v & 63];
    }
    if (i + 1 == n) {
        unsigned v = unsigned(data[i]) << 16;
        out += tab[v >> 18];
        out += tab[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == n) {
        unsigned v = unsigned(data[i]) << 16 | unsigned(data[i + 1]) << 8;
        out += tab[v >> 18];
        out += tab[(v >> 12) & 63];
        out += tab[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

} // namespace detail

/** VTK XML ImageData with one inline base64 Float64 point array named "phi". */
inline void write_vti(const std::filesystem::path& path, const Field& f) {
    const GridSpec& g = f.grid;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    char head[512];
    std::snprintf(head, sizeof head,
                  "<?xml version=\"1.0\"?>\n"
                  "<VTKFile type=\"ImageData\" version=\"1.0\" byte_order=\"LittleEndian\" "
                  "header_type=\"UInt64\">\n"
                  "  <ImageData WholeExtent=\"0 %d 0 %d 0 %d\" Origin=\"0 0 0\" "
                  "Spacing=\"%.17g %.17g %.17g\">\n"
                  "    <Piece Extent=\"0 %d 0 %d 0 %d\">\n"
                  "      <PointData Scalars=\"phi\">\n"
                  "        <DataArray type=\"Float64\" Name=\"phi\" format=\"binary\">\n",
                  g.nx - 1, g.ny - 1, g.nz - 1, g.lx / g.nx, g.ly / g.ny, g.lz / g.nz,
                  g.nx - 1, g.ny - 1, g.nz - 1);
    os << head;
    // VTK inline binary = base64(UInt64 byte count || payload)
    std::uint64_t bytes = f.values.size() * sizeof(double);
    std::vector<unsigned char> blob(sizeof bytes + bytes);
    std::memcpy(blob.data(), &bytes, sizeof bytes);
    std::memcpy(blob.data() + sizeof bytes, f.values.data(), bytes);
    os << detail::base64(blob.data(), blob.size());
    os << "\n        </DataArray>\n      </PointData>\n      <CellData/>\n"
          "    </Piece>\n  </ImageData>\n</VTKFile>\n";
    if (!os) throw IoError("short write: " + path.string());
}

/** Write basename.{raw,meta,vti} under dir per the requested formats. */
inline void write_snapshot(const std::filesystem::path& dir, const std::string& basename,
                           const Field& f, const SnapshotMeta& m,
                           const std::vector<std::string>& formats) {
    if (!f.all_finite()) throw IoError("write_snapshot: field is not finite");
    std::filesystem::create_directories(dir);
    for (const auto& fmt : formats) {
        if (fmt == "raw") {
            write_raw(dir / (basename + ".raw"), f);
            write_meta(dir / (basename + ".meta"), f.grid, m);
        } else if (fmt == "vti") {
            write_vti(dir / (basename + ".vti"), f);
        } else {
            throw IoError("unknown snapshot format: " + fmt);
        }
    }
}

/** Checkpoint = raw field next to a small JSON with grid/step/time. */
inline void write_checkpoint(const std::filesystem::path& dir, const Field& f, long step,
                             double time) {
    std::filesystem::create_directories(dir);
    write_raw(dir / "checkpoint.raw", f);
    nlohmann::json j;
    j["format_version"] = snapshot_format_version;
    j["step"] = step;
    j["time"] = time;
    j["grid"] = {{"nx", f.grid.nx}, {"ny", f.grid.ny}, {"nz", f.grid.nz},
                 {"lx", f.grid.lx}, {"ly", f.grid.ly}, {"lz", f.grid.lz}};
    std::ofstream os(dir / "checkpoint.json", std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + (dir / "checkpoint.json").string());
    os << j.dump(2) << "\n";
}

struct CheckpointData {
    Field phi{cube_grid(4)};
    long step = 0;
    double time = 0.0;
};

inline CheckpointData read_checkpoint(const std::filesystem::path& dir) {
    std::ifstream is(dir / "checkpoint.json");
    if (!is) throw IoError("cannot open checkpoint: " + (dir / "checkpoint.json").string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad checkpoint json: " + std::string(e.what()));
    }
    GridSpec g{j.at("grid").at("nx").get<int>(), j.at("grid").at("ny").get<int>(),
               j.at("grid").at("nz").get<int>(), j.at("grid").at("lx").get<double>(),
               j.at("grid").at("ly").get<double>(), j.at("grid").at("lz").get<double>()};
    CheckpointData c;
    c.phi = read_raw(dir / "checkpoint.raw", g);
    c.step = j.at("step").get<long>();
    c.time = j.at("time").get<double>();
    return c;
}

/** Append-only CSV diagnostics, full double precision for offline residual analysis. */
class DiagnosticsWriter {
  public:
    DiagnosticsWriter() = default;
    explicit DiagnosticsWriter(const std::filesystem::path& path) { open(path); }

    void open(const std::filesystem::path& path) {
        os_.open(path, std::ios::trunc);
        if (!os_) throw IoError("cannot open for writing: " + path.string());
        os_ << "step,time,E_M,W,G,T1,T2,V,A,dA,rate\n";
    }

    template <typename Row>
    void write(const Row& r) {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.step, r.time, r.energy.E_M, r.energy.W, r.energy.G, r.energy.T1,
                      r.energy.T2, r.energy.V, r.energy.A, r.energy.dA, r.rate);
        os_ << buf;
        if (!os_) throw IoError("diagnostics write failed");
    }

    void flush() { os_.flush(); }
    bool is_open() const { return os_.is_open(); }

  private:
    std::ofstream os_;
};

} // namespace vesicle
