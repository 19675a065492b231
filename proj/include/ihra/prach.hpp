#pragma once

#include <vector>

#include "ihra/geometry.hpp"
#include "ihra/rng.hpp"
#include "ihra/traffic.hpp"

namespace ihra {

struct PreambleAssignment {
  DeviceId device_id = 0;
  int preamble = 1;  // 1..num_preambles
  int ta_index = 1;  // 1..annuli
  int subcarrier_start = 1;
};

/// Count of devices per (preamble, annulus) pair as seen by the base station.
/// Both indices are 1-based.
class OccupancyMatrix {
 public:
  OccupancyMatrix(int num_preambles, int annuli);

  int num_preambles() const noexcept { return num_preambles_; }
  int annuli() const noexcept { return annuli_; }

  int at(int preamble, int ta_index) const { return counts_[offset(preamble, ta_index)]; }
  int& at(int preamble, int ta_index) { return counts_[offset(preamble, ta_index)]; }

  int total() const noexcept;
  int preamble_total(int preamble) const;

  bool operator==(const OccupancyMatrix&) const = default;

 private:
  std::size_t offset(int preamble, int ta_index) const;

  int num_preambles_;
  int annuli_;
  std::vector<int> counts_;
};

/// Index of the first subcarrier used by annulus `ta_index`:
/// floor((26 - annuli) / 2) + ta_index.
int subcarrier_start(int annuli, int ta_index);

/// Each device independently picks a uniform preamble in 1..num_preambles.
std::vector<PreambleAssignment> select_preambles(const MmtcPopulation& population, int annuli,
                                                 int num_preambles, Rng& rng);

/// Ideal detection: exact per-(preamble, annulus) histogram.
OccupancyMatrix detect_occupancy(const std::vector<PreambleAssignment>& assignments,
                                 int num_preambles, int annuli);

/// Detection with a per-cell miss probability. A missed cell reads as empty,
/// which hides its devices from RAR generation. With miss_probability == 0 the
/// result equals the ideal detector and no random numbers are consumed.
OccupancyMatrix detect_occupancy(const std::vector<PreambleAssignment>& assignments,
                                 int num_preambles, int annuli, double miss_probability,
                                 Rng& rng);

}  // namespace ihra
