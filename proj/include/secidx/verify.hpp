#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "secidx/case_io.hpp"
#include "secidx/costly_cut.hpp"
#include "secidx/power_model.hpp"

// Seeded random instances and the oracle cross-checks run by `verify`.

namespace secidx {

/// Connected network: a random spanning tree plus extra lines (parallel lines
/// allowed), reactances uniform in [0.5, 2].
PowerNetwork random_network(std::mt19937_64& rng, std::size_t buses, std::size_t lines);

/// Each measurement kept independently with probability `keep`; redrawn
/// until observable when `observable` is set (at most 1000 draws).
MeasurementPlacement random_placement(std::mt19937_64& rng, const PowerNetwork& net, double keep,
                                      bool observable);

struct RandomCaseOptions {
  std::size_t min_buses = 2;
  std::size_t max_buses = 10;
  std::size_t max_lines = 15;
  double keep = 1.0;  // 1 means full measurement
  bool observable = true;
};

CaseFile random_case(std::mt19937_64& rng, const RandomCaseOptions& options);

/// Integer costs in [0, max_cost], edge count up to `max_edges`; one-sided
/// node costs unless `two_sided`, and mirrored edges when `symmetric`.
CostlyCutInstance random_cut_instance(std::mt19937_64& rng, std::size_t nodes, std::size_t max_edges,
                                      int max_cost, bool symmetric, bool two_sided);

enum class CheckStatus { Pass, Fail, Skip };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Cross-checks of the cut pipeline against the oracles for every
/// measurement. Oracle checks are skipped past `max_buses` buses or the row
/// guard of the continuous oracle.
VerifyReport verify_case(const CaseFile& file, std::size_t max_buses = 10);

std::string_view to_string(CheckStatus status);

}  // namespace secidx
