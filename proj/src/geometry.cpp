#include "fibrow/geometry.hpp"

#include "fibrow/errors.hpp"

namespace fibrow {

std::vector<double> positional_encoding(const Point3& p, int num_frequencies) {
  if (num_frequencies < 0)
    fail(Errc::config_invalid, "positional_encoding: num_frequencies < 0");
  std::vector<double> out;
  out.reserve(3 + 6 * static_cast<size_t>(num_frequencies));
  out.push_back(p.x);
  out.push_back(p.y);
  out.push_back(p.z);
  double freq = kPi;  // 2^0 * pi
  for (int k = 0; k < num_frequencies; ++k) {
    for (double c : {p.x, p.y, p.z}) {
      out.push_back(std::sin(freq * c));
      out.push_back(std::cos(freq * c));
    }
    freq *= 2.0;
  }
  return out;
}

}  // namespace fibrow
