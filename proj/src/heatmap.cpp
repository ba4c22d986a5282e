#include "gfnlab/heatmap.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace gfnlab {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_dist_csv(const std::string& path, const Vector& dist, int height) {
    if (dist.size() != static_cast<int64_t>(height) * height)
        throw std::invalid_argument("dist.csv: expected an HxH distribution");
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + path);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < height; ++c) {
            if (c) f << ',';
            f << format_double(dist(static_cast<int64_t>(r) * height + c));
        }
        f << '\n';
    }
}

Vector read_dist_csv(const std::string& path, int& height_out) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path);
    std::vector<double> values;
    std::string line;
    int rows = 0;
    int cols = -1;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int c = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++c;
        }
        if (cols == -1) cols = c;
        if (c != cols) throw FormatError("ragged rows in " + path);
        ++rows;
    }
    if (rows != cols) throw FormatError("dist.csv must be square");
    height_out = rows;
    Vector out(static_cast<int64_t>(rows) * cols);
    for (size_t i = 0; i < values.size(); ++i) out(static_cast<int64_t>(i)) = values[i];
    return out;
}

void write_heatmap_pgm(const std::string& path, const Vector& dist, int height) {
    if (dist.size() != static_cast<int64_t>(height) * height)
        throw std::invalid_argument("heatmap: expected an HxH distribution");
    const double peak = dist.maxCoeff();
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + path);
    f << "P2\n" << height << ' ' << height << "\n255\n";
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < height; ++c) {
            int v = peak > 0.0
                        ? static_cast<int>(std::lround(
                              255.0 * dist(static_cast<int64_t>(r) * height + c) / peak))
                        : 0;
            if (c) f << ' ';
            f << v;
        }
        f << '\n';
    }
}

}  // namespace gfnlab
