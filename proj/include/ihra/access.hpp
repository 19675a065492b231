#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ihra/geometry.hpp"
#include "ihra/prach.hpp"
#include "ihra/rng.hpp"
#include "ihra/traffic.hpp"

namespace ihra {

using ResourceBlockId = int;

/// Random access response granting one resource block to the single device
/// that used `preamble` from annulus `ta_index`.
struct Rar {
  int preamble = 1;
  int ta_index = 1;
  ResourceBlockId resource_block = 0;

  bool operator==(const Rar&) const = default;
};

/// How MSG3 transmit power is chosen.
enum class PowerPolicy {
  ihra,         // TA-matched devices use the top level, others draw uniformly
  ihra_random,  // every device draws uniformly
};

std::string_view to_string(PowerPolicy policy);

struct Msg3Transmission {
  DeviceId device_id = 0;
  ResourceBlockId resource_block = 0;
  int power_level = 1;  // 1..L, L is strongest
  bool matched = false;
};

/// Devices transmitting on one resource block, grouped by power level.
class RbLoad {
 public:
  explicit RbLoad(int power_levels);

  int power_levels() const noexcept { return static_cast<int>(levels_.size()); }
  void add(DeviceId device, int power_level);
  const std::vector<DeviceId>& at(int power_level) const;

 private:
  std::vector<std::vector<DeviceId>> levels_;
};

struct SlotOutcome {
  int mmtc_success = 0;
  int mmtc_failed_no_rar = 0;
  int mmtc_failed_collision = 0;
  int urllc_success = 0;
  int urllc_actual = 0;
  int urllc_predicted = 0;

  int mmtc_active() const noexcept {
    return mmtc_success + mmtc_failed_no_rar + mmtc_failed_collision;
  }
  int total_success() const noexcept { return mmtc_success + urllc_success; }

  bool operator==(const SlotOutcome&) const = default;
};

/// One RAR per singleton cell n(r,i) == 1, in (preamble, annulus)
/// lexicographic order, with resource blocks numbered 0, 1, 2, ...
std::vector<Rar> generate_rars(const OccupancyMatrix& occupancy);

/// The contiguous run of `rars` (as ordered by generate_rars) for `preamble`.
std::span<const Rar> rars_for_preamble(std::span<const Rar> rars, int preamble);

/// Which levels an unmatched device may draw from under PowerPolicy::ihra.
enum class UnmatchedLevels {
  below_top,  // 1..L-1, leaving L to TA-matched devices (1 when L == 1)
  all,        // 1..L
};

/// MSG3 decision of one device given the RARs of its preamble. Returns
/// nullopt when the preamble received no RAR. Under ihra_random every device
/// draws its level uniformly from 1..L regardless of `unmatched`.
std::optional<Msg3Transmission> allocate_msg3(const PreambleAssignment& assignment,
                                              std::span<const Rar> preamble_rars,
                                              PowerPolicy policy, int power_levels, Rng& rng,
                                              UnmatchedLevels unmatched = UnmatchedLevels::below_top);

/// Successive interference cancellation on one resource block. Levels are
/// scanned from strongest to weakest: an empty level is skipped, a single
/// device is decoded and cancelled, and two or more devices halt the scan.
/// Returns decoded devices strongest first.
std::vector<DeviceId> sic_decode(const RbLoad& load);

/// URLLC devices served by a multi-user detector dimensioned for
/// `predicted` devices: min(predicted, actual).
int urllc_round(int predicted, int actual);

struct AccessConfig {
  GeometryConfig geometry;
  int num_preambles = 40;
  int power_levels = 4;
  PowerPolicy policy = PowerPolicy::ihra;
  UnmatchedLevels unmatched_levels = UnmatchedLevels::below_top;
  double detection_miss_probability = 0.0;

  void validate() const;
};

/// One slot of the hybrid scheme: MSG1 through MSG4 for the mMTC population
/// plus the contention-free URLLC round.
SlotOutcome ihra_slot(const AccessConfig& config, const MmtcPopulation& population,
                      int urllc_actual, int urllc_predicted, Rng& rng);

/// Traditional four-step access with `total_devices` contenders: successes
/// are the preambles picked by exactly one device.
int tara_slot(int total_devices, int num_preambles, Rng& rng);

/// Same as tara_slot, with URLLC devices contending alongside mMTC devices
/// and the successes split by class. Devices 0..mmtc-1 are mMTC.
SlotOutcome tara_slot(int mmtc_devices, int urllc_devices, int num_preambles, Rng& rng);

}  // namespace ihra
