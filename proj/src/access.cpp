#include "ihra/access.hpp"

#include <algorithm>
#include <string>

#include "ihra/errors.hpp"

namespace ihra {

std::string_view to_string(PowerPolicy policy) {
  switch (policy) {
    case PowerPolicy::ihra:
      return "ihra";
    case PowerPolicy::ihra_random:
      return "ihra-random";
  }
  return "unknown";
}

RbLoad::RbLoad(int power_levels) {
  if (power_levels < 1) throw ConfigError("power_levels", "must be at least 1");
  levels_.resize(static_cast<std::size_t>(power_levels));
}

void RbLoad::add(DeviceId device, int power_level) {
  if (power_level < 1 || power_level > power_levels()) {
    throw InputError("RbLoad::add: power level " + std::to_string(power_level) + " out of range");
  }
  levels_[static_cast<std::size_t>(power_level - 1)].push_back(device);
}

const std::vector<DeviceId>& RbLoad::at(int power_level) const {
  if (power_level < 1 || power_level > power_levels()) {
    throw InputError("RbLoad::at: power level " + std::to_string(power_level) + " out of range");
  }
  return levels_[static_cast<std::size_t>(power_level - 1)];
}

std::vector<Rar> generate_rars(const OccupancyMatrix& occupancy) {
  std::vector<Rar> rars;
  ResourceBlockId next_rb = 0;
  for (int r = 1; r <= occupancy.num_preambles(); ++r) {
    for (int i = 1; i <= occupancy.annuli(); ++i) {
      if (occupancy.at(r, i) == 1) rars.push_back(Rar{r, i, next_rb++});
    }
  }
  return rars;
}

std::span<const Rar> rars_for_preamble(std::span<const Rar> rars, int preamble) {
  const auto lo = std::lower_bound(rars.begin(), rars.end(), preamble,
                                   [](const Rar& rar, int p) { return rar.preamble < p; });
  const auto hi = std::upper_bound(lo, rars.end(), preamble,
                                   [](int p, const Rar& rar) { return p < rar.preamble; });
  return {lo, hi};
}

std::optional<Msg3Transmission> allocate_msg3(const PreambleAssignment& assignment,
                                              std::span<const Rar> preamble_rars,
                                              PowerPolicy policy, int power_levels, Rng& rng,
                                              UnmatchedLevels unmatched) {
  if (power_levels < 1) throw ConfigError("power_levels", "must be at least 1");
  if (preamble_rars.empty()) return std::nullopt;

  const auto match = std::find_if(preamble_rars.begin(), preamble_rars.end(), [&](const Rar& rar) {
    return rar.preamble == assignment.preamble && rar.ta_index == assignment.ta_index;
  });

  Msg3Transmission tx;
  tx.device_id = assignment.device_id;
  if (match != preamble_rars.end()) {
    tx.matched = true;
    tx.resource_block = match->resource_block;
  } else {
    const auto pick = rng.below(preamble_rars.size());
    tx.resource_block = preamble_rars[pick].resource_block;
  }
  if (policy == PowerPolicy::ihra_random) {
    tx.power_level = rng.uniform_int(1, power_levels);
  } else if (tx.matched) {
    tx.power_level = power_levels;
  } else {
    const bool reserve = unmatched == UnmatchedLevels::below_top && power_levels > 1;
    tx.power_level = rng.uniform_int(1, reserve ? power_levels - 1 : power_levels);
  }
  return tx;
}

std::vector<DeviceId> sic_decode(const RbLoad& load) {
  std::vector<DeviceId> decoded;
  for (int level = load.power_levels(); level >= 1; --level) {
    const auto& devices = load.at(level);
    if (devices.empty()) continue;
    if (devices.size() > 1) break;
    decoded.push_back(devices.front());
  }
  return decoded;
}

int urllc_round(int predicted, int actual) {
  if (predicted < 0 || actual < 0) throw InputError("urllc_round: counts must be non-negative");
  return std::min(predicted, actual);
}

void AccessConfig::validate() const {
  if (annulus_count(geometry.cell_radius_m, geometry.quantum_m) != geometry.annuli) {
    throw ConfigError("annuli", "does not match ceil(cell_radius_m / quantum_m)");
  }
  if (num_preambles < 1) throw ConfigError("num_preambles", "must be at least 1");
  if (power_levels < 1) throw ConfigError("power_levels", "must be at least 1");
  if (!(detection_miss_probability >= 0.0 && detection_miss_probability <= 1.0)) {
    throw ConfigError("detection_miss_probability", "must be in [0, 1]");
  }
}

SlotOutcome ihra_slot(const AccessConfig& config, const MmtcPopulation& population,
                      int urllc_actual, int urllc_predicted, Rng& rng) {
  config.validate();
  SlotOutcome outcome;
  outcome.urllc_actual = urllc_actual;
  outcome.urllc_predicted = urllc_predicted;
  outcome.urllc_success = urllc_round(urllc_predicted, urllc_actual);

  const auto assignments =
      select_preambles(population, config.geometry.annuli, config.num_preambles, rng);
  const auto occupancy =
      detect_occupancy(assignments, config.num_preambles, config.geometry.annuli,
                       config.detection_miss_probability, rng);
  const auto rars = generate_rars(occupancy);

  std::vector<RbLoad> loads(rars.size(), RbLoad(config.power_levels));
  int transmitted = 0;
  for (const auto& assignment : assignments) {
    const auto tx = allocate_msg3(assignment, rars_for_preamble(rars, assignment.preamble),
                                  config.policy, config.power_levels, rng, config.unmatched_levels);
    if (!tx) {
      ++outcome.mmtc_failed_no_rar;
      continue;
    }
    loads[static_cast<std::size_t>(tx->resource_block)].add(tx->device_id, tx->power_level);
    ++transmitted;
  }
  for (const auto& load : loads) outcome.mmtc_success += static_cast<int>(sic_decode(load).size());
  outcome.mmtc_failed_collision = transmitted - outcome.mmtc_success;
  return outcome;
}

SlotOutcome tara_slot(int mmtc_devices, int urllc_devices, int num_preambles, Rng& rng) {
  if (mmtc_devices < 0 || urllc_devices < 0) {
    throw InputError("tara_slot: device counts must be non-negative");
  }
  if (num_preambles < 1) throw ConfigError("num_preambles", "must be at least 1");
  const int total = mmtc_devices + urllc_devices;
  std::vector<int> choice(static_cast<std::size_t>(total));
  std::vector<int> load(static_cast<std::size_t>(num_preambles), 0);
  for (auto& c : choice) {
    c = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_preambles)));
    ++load[static_cast<std::size_t>(c)];
  }
  SlotOutcome outcome;
  outcome.urllc_actual = urllc_devices;
  for (int k = 0; k < total; ++k) {
    const bool alone = load[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)])] == 1;
    if (k < mmtc_devices) {
      if (alone) ++outcome.mmtc_success;
      else ++outcome.mmtc_failed_collision;
    } else if (alone) {
      ++outcome.urllc_success;
    }
  }
  return outcome;
}

int tara_slot(int total_devices, int num_preambles, Rng& rng) {
  return tara_slot(total_devices, 0, num_preambles, rng).mmtc_success;
}

}  // namespace ihra
