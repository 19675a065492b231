#include "ihra/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ihra/errors.hpp"

namespace ihra {

GeometryConfig GeometryConfig::make(double cell_radius_m, double quantum_m) {
  return GeometryConfig{cell_radius_m, quantum_m, annulus_count(cell_radius_m, quantum_m)};
}

int annulus_count(double cell_radius_m, double quantum_m) {
  if (!(cell_radius_m > 0.0) || !std::isfinite(cell_radius_m)) {
    throw ConfigError("cell_radius_m", "must be positive and finite");
  }
  if (!(quantum_m > 0.0) || !std::isfinite(quantum_m)) {
    throw ConfigError("quantum_m", "must be positive and finite");
  }
  const double count = std::ceil(cell_radius_m / quantum_m);
  if (count > kSubcarrierWindow) {
    throw ConfigError("cell_radius_m", "cell needs " + std::to_string(static_cast<long long>(count)) +
                                           " annuli; at most " + std::to_string(kSubcarrierWindow) +
                                           " fit the subcarrier window");
  }
  return static_cast<int>(count);
}

int ta_index(double distance_m, double quantum_m, int annuli) {
  if (!(distance_m >= 0.0)) throw InputError("ta_index: distance must be non-negative");
  if (!(quantum_m > 0.0)) throw InputError("ta_index: quantum must be positive");
  if (annuli < 1) throw InputError("ta_index: annuli must be at least 1");
  const double ring = std::floor(distance_m / quantum_m) + 1.0;
  return static_cast<int>(std::clamp(ring, 1.0, static_cast<double>(annuli)));
}

double sample_distance(double cell_radius_m, Rng& rng) {
  return cell_radius_m * std::sqrt(rng.uniform());
}

DevicePlacement place_device(DeviceId id, const GeometryConfig& geometry, Rng& rng) {
  const double d = sample_distance(geometry.cell_radius_m, rng);
  return DevicePlacement{id, d, ta_index(d, geometry.quantum_m, geometry.annuli)};
}

}  // namespace ihra
