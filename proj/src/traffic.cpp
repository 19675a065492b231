#include "ihra/traffic.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "ihra/errors.hpp"

namespace ihra {

UrllcSeries poisson_series(double lambda, std::size_t horizon, Rng& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("poisson_series: lambda must be finite and non-negative");
  }
  if (horizon < 1) throw InputError("poisson_series: horizon must be at least 1");
  UrllcSeries series;
  series.mean_rate = lambda;
  series.counts.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    series.counts.push_back(static_cast<int>(rng.poisson(lambda)));
  }
  return series;
}

MmtcPopulation activate_mmtc(int count, const GeometryConfig& geometry, Rng& rng) {
  if (count < 0) throw InputError("activate_mmtc: count must be non-negative");
  MmtcPopulation population;
  population.devices.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    population.devices.push_back(place_device(static_cast<DeviceId>(k), geometry, rng));
  }
  return population;
}

void write_series_csv(std::ostream& out, const UrllcSeries& series) {
  out << "slot,count\n";
  for (std::size_t t = 0; t < series.counts.size(); ++t) {
    out << t << ',' << series.counts[t] << '\n';
  }
}

UrllcSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "slot,count") {
    throw IoError("series csv: expected header 'slot,count'");
  }
  UrllcSeries series;
  std::size_t expected_slot = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long long slot = -1;
    long long count = -1;
    char comma = 0;
    if (!(row >> slot >> comma >> count) || comma != ',' || count < 0 ||
        slot != static_cast<long long>(expected_slot)) {
      throw IoError("series csv: malformed row " + std::to_string(expected_slot + 2) + ": '" + line + "'");
    }
    series.counts.push_back(static_cast<int>(count));
    ++expected_slot;
  }
  if (!series.counts.empty()) {
    const double total = std::accumulate(series.counts.begin(), series.counts.end(), 0.0);
    series.mean_rate = total / static_cast<double>(series.counts.size());
  }
  return series;
}

}  // namespace ihra
