#include "fibrow/density.hpp"

#include <algorithm>
#include <cmath>

#include "fibrow/errors.hpp"

namespace fibrow {

double DensityMap::total_mass() const {
  double sum = 0.0;
  for (float v : values) sum += v;
  return sum;
}

float DensityMap::max_value() const {
  float m = 0.0f;
  for (float v : values) m = std::max(m, v);
  return m;
}

namespace {

// sigma per root from the mean distance to the knn_k nearest other roots.
std::vector<double> adaptive_sigmas(const std::vector<Root2D>& roots,
                                    const DensityGenConfig& cfg) {
  const size_t n = roots.size();
  std::vector<double> sigmas(n, cfg.sigma_min);
  if (n < 2) return sigmas;
  const size_t k = std::min(static_cast<size_t>(cfg.knn_k), n - 1);
  std::vector<double> dists;
  dists.reserve(n - 1);
  for (size_t i = 0; i < n; ++i) {
    dists.clear();
    for (size_t j = 0; j < n; ++j)
      if (j != i) dists.push_back(distance(roots[i], roots[j]));
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
    double mean = 0.0;
    for (size_t m = 0; m < k; ++m) mean += dists[m];
    mean /= static_cast<double>(k);
    sigmas[i] = std::clamp(cfg.beta * mean, cfg.sigma_min, cfg.sigma_max);
  }
  return sigmas;
}

}  // namespace

DensityMap density_from_roots(const std::vector<Root2D>& roots2d, int w, int h,
                              const DensityGenConfig& cfg) {
  if (w <= 0 || h <= 0)
    fail(Errc::config_invalid, "density_from_roots: non-positive dimensions");
  if (cfg.knn_k < 1 || cfg.beta <= 0.0 || cfg.sigma_min <= 0.0 ||
      cfg.sigma_min > cfg.sigma_max)
    fail(Errc::config_invalid, "density_from_roots: bad kernel config");
  DensityMap map(w, h);
  if (roots2d.empty()) return map;
  for (const auto& r : roots2d)
    if (!(r.x >= 0.0 && r.x < w && r.y >= 0.0 && r.y < h))
      fail(Errc::config_invalid, "density_from_roots: root outside map");

  const std::vector<double> sigmas = adaptive_sigmas(roots2d, cfg);
  for (size_t i = 0; i < roots2d.size(); ++i) {
    const double sigma = sigmas[i];
    const double cutoff = cfg.truncation_radius * sigma;
    const double cutoff2 = cutoff * cutoff;
    const double norm = 1.0 / (2.0 * kPi * sigma * sigma);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const Root2D& r = roots2d[i];
    const int x0 = std::max(0, static_cast<int>(std::floor(r.x - cutoff)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(r.x + cutoff)));
    const int y0 = std::max(0, static_cast<int>(std::floor(r.y - cutoff)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(r.y + cutoff)));
    for (int iy = y0; iy <= y1; ++iy) {
      const double dy = (iy + 0.5) - r.y;
      for (int ix = x0; ix <= x1; ++ix) {
        const double dx = (ix + 0.5) - r.x;
        const double d2 = dx * dx + dy * dy;
        if (d2 > cutoff2) continue;
        map.at(ix, iy) += static_cast<float>(norm * std::exp(-d2 * inv2s2));
      }
    }
  }
  return map;
}

double density_mse(const DensityMap& a, const DensityMap& b) {
  if (a.width != b.width || a.height != b.height)
    fail(Errc::dimension_mismatch, "density_mse: dimension mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = static_cast<double>(a.values[i]) - b.values[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.values.size());
}

std::vector<Root2D> threshold_candidates(const DensityMap& map, double tau) {
  if (tau < 0.0) fail(Errc::config_invalid, "threshold_candidates: tau < 0");
  std::vector<Root2D> out;
  for (int iy = 0; iy < map.height; ++iy)
    for (int ix = 0; ix < map.width; ++ix)
      if (map.at(ix, iy) >= tau) out.push_back({ix + 0.5, iy + 0.5});
  return out;
}

double default_threshold(const DensityMap& map) {
  return 0.2 * static_cast<double>(map.max_value());
}

}  // namespace fibrow
