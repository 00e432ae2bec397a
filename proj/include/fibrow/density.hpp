#pragma once

#include <vector>

#include "fibrow/geometry.hpp"

namespace fibrow {

// Single-channel root-existence response image, row-major.
struct DensityMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DensityMap() = default;
  DensityMap(int w, int h)
      : width(w), height(h),
        values(static_cast<size_t>(w) * static_cast<size_t>(h), 0.0f) {}

  float at(int ix, int iy) const {
    return values[static_cast<size_t>(iy) * width + ix];
  }
  float& at(int ix, int iy) {
    return values[static_cast<size_t>(iy) * width + ix];
  }
  double total_mass() const;
  float max_value() const;
};

// Adaptive-window Gaussian kernel parameters (crowd-counting convention):
// sigma_i = clamp(beta * mean distance to knn_k nearest roots,
//                 sigma_min, sigma_max), in pixels.
struct DensityGenConfig {
  int knn_k = 3;
  double beta = 0.3;
  double sigma_min = 1.0;
  double sigma_max = 10.0;
  double truncation_radius = 3.0;  // in multiples of sigma
};

// Sum of one unit-mass Gaussian kernel per root, evaluated at pixel centers
// and truncated at truncation_radius * sigma. A single root uses sigma_min.
// Roots must project inside the map; an empty list yields an all-zero map.
DensityMap density_from_roots(const std::vector<Root2D>& roots2d, int w, int h,
                              const DensityGenConfig& cfg = {});

// Mean over pixels of the squared difference.
double density_mse(const DensityMap& a, const DensityMap& b);

// Pixel centers with value >= tau, in row-major order.
std::vector<Root2D> threshold_candidates(const DensityMap& map, double tau);

// Default candidate threshold: 0.2 x map maximum.
double default_threshold(const DensityMap& map);

}  // namespace fibrow
