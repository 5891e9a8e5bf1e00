#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ks3bp/encounters.hpp"
#include "ks3bp/system.hpp"

namespace ks3bp {

/// CSV table writer emitting 17 significant digits (lossless for doubles).
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path), ncols_(columns.size()) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        if (values.size() != ncols_) throw std::invalid_argument("CsvWriter: column count mismatch");
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t ncols_;
};

/// Encounter records as JSON lines, one object per transit.
inline void write_encounters_jsonl(const std::string& path,
                                   const std::vector<EncounterRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (const auto& r : records) {
        nlohmann::json j{
            {"s_entry", r.s_entry},
            {"f_entry", r.f_entry},
            {"s_exit", r.s_exit},
            {"f_exit", r.f_exit},
            {"s_closest", r.s_closest},
            {"f_closest", r.f_closest},
            {"d2_min", r.d2_min},
            {"gamma_entry", r.gamma_entry},
            {"gamma_min", r.gamma_min},
            {"gamma_max", r.gamma_max},
            {"gamma_drift_max", r.gamma_drift_max},
            {"gamma_drift_bound", r.gamma_drift_bound},
            {"hyperbolic", r.hyperbolic},
            {"open_start", r.open_start},
            {"open_end", r.open_end},
        };
        out << j.dump() << "\n";
    }
}

/// A scalar field sampled over a rectangular grid, row-major with the first
/// axis (x) varying fastest.
struct Raster {
    std::string name;
    long nx = 0, ny = 0;
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    std::vector<double> data; // nx * ny values

    double& at(long ix, long iy) { return data[static_cast<std::size_t>(iy) * nx + ix]; }
    double at(long ix, long iy) const { return data[static_cast<std::size_t>(iy) * nx + ix]; }
};

/// Write a raster in the three formats: CSV (x, y, value), raw float64 binary
/// (row-major, x fastest), and a JSON sidecar describing the geometry.
inline void write_raster(const Raster& r, const std::string& stem,
                         const nlohmann::json& extra_metadata = {}) {
    {
        CsvWriter csv(stem + ".csv", {"x", "vx", r.name});
        for (long iy = 0; iy < r.ny; ++iy) {
            const double y = r.y_min + (r.y_max - r.y_min) * static_cast<double>(iy) /
                                           static_cast<double>(r.ny - 1);
            for (long ix = 0; ix < r.nx; ++ix) {
                const double x = r.x_min + (r.x_max - r.x_min) * static_cast<double>(ix) /
                                               static_cast<double>(r.nx - 1);
                csv.row({x, y, r.at(ix, iy)});
            }
        }
    }
    {
        std::ofstream bin(stem + ".bin", std::ios::binary);
        if (!bin) throw std::runtime_error("cannot open output file: " + stem + ".bin");
        bin.write(reinterpret_cast<const char*>(r.data.data()),
                  static_cast<std::streamsize>(r.data.size() * sizeof(double)));
    }
    {
        nlohmann::json j{
            {"indicator", r.name},
            {"nx", r.nx},
            {"ny", r.ny},
            {"x_min", r.x_min},
            {"x_max", r.x_max},
            {"vx_min", r.y_min},
            {"vx_max", r.y_max},
            {"layout", "row-major, x fastest"},
            {"dtype", "float64"},
        };
        if (!extra_metadata.is_null()) {
            for (auto it = extra_metadata.begin(); it != extra_metadata.end(); ++it)
                j[it.key()] = it.value();
        }
        std::ofstream side(stem + ".json");
        if (!side) throw std::runtime_error("cannot open output file: " + stem + ".json");
        side << j.dump(2) << "\n";
    }
}

} // namespace ks3bp
