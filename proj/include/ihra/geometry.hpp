#pragma once

#include <cstdint>

#include "ihra/rng.hpp"

namespace ihra {

/// Number of PRACH subcarriers over which annulus-dependent preamble
/// placement is spread. Bounds the number of annuli a cell may have.
inline constexpr int kSubcarrierWindow = 26;

/// Width of one timing-advance annulus in meters.
inline constexpr double kDefaultQuantumM = 156.0;

using DeviceId = std::uint32_t;

/// Circular cell split into concentric TA annuli of width `quantum_m`.
struct GeometryConfig {
  double cell_radius_m = 1200.0;
  double quantum_m = kDefaultQuantumM;
  int annuli = 8;

  /// Builds a validated configuration, deriving the annulus count.
  static GeometryConfig make(double cell_radius_m, double quantum_m = kDefaultQuantumM);
};

struct DevicePlacement {
  DeviceId device_id = 0;
  double distance_m = 0.0;
  int ta_index = 1;
};

/// ceil(R / q). Throws ConfigError for non-positive inputs or when the cell
/// would need more annuli than the subcarrier window holds.
int annulus_count(double cell_radius_m, double quantum_m);

/// 1-based annulus of a device at `distance_m`. A distance exactly on an
/// annulus edge belongs to the outer annulus; results clamp to [1, annuli].
int ta_index(double distance_m, double quantum_m, int annuli);

/// Distance of a point drawn uniformly over the disk area: R * sqrt(u).
double sample_distance(double cell_radius_m, Rng& rng);

DevicePlacement place_device(DeviceId id, const GeometryConfig& geometry, Rng& rng);

}  // namespace ihra
