#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ihra/geometry.hpp"
#include "ihra/rng.hpp"

namespace ihra {

/// Active URLLC device count per slot.
struct UrllcSeries {
  std::vector<int> counts;
  double mean_rate = 0.0;

  std::size_t size() const noexcept { return counts.size(); }
};

struct MmtcPopulation {
  std::vector<DevicePlacement> devices;

  std::size_t count() const noexcept { return devices.size(); }
};

/// i.i.d. Poisson(lambda) counts for `horizon` slots.
UrllcSeries poisson_series(double lambda, std::size_t horizon, Rng& rng);

/// `count` freshly placed mMTC devices with ids 0..count-1.
MmtcPopulation activate_mmtc(int count, const GeometryConfig& geometry, Rng& rng);

/// CSV with header `slot,count`, one row per slot starting at slot 0.
void write_series_csv(std::ostream& out, const UrllcSeries& series);

/// Parses the format produced by write_series_csv. `mean_rate` is not stored
/// in the file and is set to the sample mean. Throws IoError on malformed input.
UrllcSeries read_series_csv(std::istream& in);

}  // namespace ihra
