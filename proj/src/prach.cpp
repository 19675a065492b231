#include "ihra/prach.hpp"

#include <numeric>
#include <string>

#include "ihra/errors.hpp"

namespace ihra {

OccupancyMatrix::OccupancyMatrix(int num_preambles, int annuli)
    : num_preambles_(num_preambles), annuli_(annuli) {
  if (num_preambles < 1) throw ConfigError("num_preambles", "must be at least 1");
  if (annuli < 1 || annuli > kSubcarrierWindow) {
    throw ConfigError("annuli", "must be in 1.." + std::to_string(kSubcarrierWindow));
  }
  counts_.assign(static_cast<std::size_t>(num_preambles) * static_cast<std::size_t>(annuli), 0);
}

std::size_t OccupancyMatrix::offset(int preamble, int ta_index) const {
  if (preamble < 1 || preamble > num_preambles_ || ta_index < 1 || ta_index > annuli_) {
    throw InputError("OccupancyMatrix: index (" + std::to_string(preamble) + ", " +
                     std::to_string(ta_index) + ") out of range");
  }
  return static_cast<std::size_t>(preamble - 1) * static_cast<std::size_t>(annuli_) +
         static_cast<std::size_t>(ta_index - 1);
}

int OccupancyMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), 0);
}

int OccupancyMatrix::preamble_total(int preamble) const {
  const auto begin = counts_.begin() + static_cast<std::ptrdiff_t>(offset(preamble, 1));
  return std::accumulate(begin, begin + annuli_, 0);
}

int subcarrier_start(int annuli, int ta_index) {
  if (annuli < 1 || annuli > kSubcarrierWindow) {
    throw ConfigError("annuli", "must be in 1.." + std::to_string(kSubcarrierWindow));
  }
  if (ta_index < 1 || ta_index > annuli) {
    throw InputError("subcarrier_start: ta_index outside 1..annuli");
  }
  return (kSubcarrierWindow - annuli) / 2 + ta_index;
}

std::vector<PreambleAssignment> select_preambles(const MmtcPopulation& population, int annuli,
                                                 int num_preambles, Rng& rng) {
  if (num_preambles < 1) throw ConfigError("num_preambles", "must be at least 1");
  std::vector<PreambleAssignment> out;
  out.reserve(population.count());
  for (const auto& device : population.devices) {
    const int preamble = rng.uniform_int(1, num_preambles);
    out.push_back(PreambleAssignment{device.device_id, preamble, device.ta_index,
                                     subcarrier_start(annuli, device.ta_index)});
  }
  return out;
}

OccupancyMatrix detect_occupancy(const std::vector<PreambleAssignment>& assignments,
                                 int num_preambles, int annuli) {
  OccupancyMatrix occupancy(num_preambles, annuli);
  for (const auto& a : assignments) ++occupancy.at(a.preamble, a.ta_index);
  return occupancy;
}

OccupancyMatrix detect_occupancy(const std::vector<PreambleAssignment>& assignments,
                                 int num_preambles, int annuli, double miss_probability,
                                 Rng& rng) {
  if (!(miss_probability >= 0.0 && miss_probability <= 1.0)) {
    throw ConfigError("detection_miss_probability", "must be in [0, 1]");
  }
  OccupancyMatrix occupancy = detect_occupancy(assignments, num_preambles, annuli);
  if (miss_probability == 0.0) return occupancy;
  for (int r = 1; r <= num_preambles; ++r) {
    for (int i = 1; i <= annuli; ++i) {
      if (occupancy.at(r, i) > 0 && rng.uniform() < miss_probability) occupancy.at(r, i) = 0;
    }
  }
  return occupancy;
}

}  // namespace ihra
