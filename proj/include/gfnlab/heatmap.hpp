#pragma once

#include "gfnlab/common.hpp"

#include <string>

namespace gfnlab {

// H x H terminal distribution for a 2D grid, row r = coordinate x0, column
// c = coordinate x1. dist.csv carries the raw probabilities; the graymap is
// normalized so the highest-probability cell is white (255).
void write_dist_csv(const std::string& path, const Vector& dist, int height);
Vector read_dist_csv(const std::string& path, int& height_out);
void write_heatmap_pgm(const std::string& path, const Vector& dist, int height);

}  // namespace gfnlab
