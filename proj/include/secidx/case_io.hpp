#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secidx/costly_cut.hpp"
#include "secidx/power_model.hpp"
#include "secidx/rational.hpp"
#include "secidx/security_index.hpp"
#include "secidx/weights.hpp"

// File formats. Ids are 1-based in every file and 0-based in memory.

namespace secidx {

struct CaseFile {
  PowerNetwork net;
  MeasurementPlacement meas;
  std::map<LineId, Rational> edge_cost_overrides;
  std::map<BusId, Rational> node_cost_overrides;
  // Original bus numbers, for MATPOWER input; identity otherwise.
  std::vector<long long> bus_ids;

  /// Meter-count weights with the overrides applied.
  WeightAssignment weights() const;

  friend bool operator==(const CaseFile&, const CaseFile&) = default;
};

/// JSON case:
///   {"buses": N, "lines": [[from, to, x], ...],
///    "measurements": {"flow_from": [ids] | "all", "flow_to": ..., "injection": ...},
///    "weights": {"edge_costs": {"<line>": c}, "node_costs": {"<bus>": p}}}
/// Costs and reactances are numbers or "p/q" strings. Unknown keys are errors.
CaseFile parse_native(const std::filesystem::path& path);
CaseFile parse_native_text(std::string_view text);

/// Emits the JSON case format; parse_native_text(emit_native(c)) == c.
std::string emit_native(const CaseFile& file);

/// Only the `bus` and `branch` matrices are read. Branches with status 0 are
/// skipped and bus numbers are renumbered densely in order of appearance.
/// Placement is full unless `sidecar` names a JSON file with `measurements`
/// and/or `weights` keys, referring to the renumbered ids.
CaseFile parse_matpower_subset(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& sidecar = std::nullopt);
CaseFile parse_matpower_text(std::string_view text);

/// Dispatches on extension: ".m" is MATPOWER, anything else JSON.
CaseFile load_case(const std::filesystem::path& path);

/// Costly-cut instance text:
///   nodes N
///   edge FROM TO COST        (repeatable)
///   node ID COST             (unlisted nodes cost 0)
///   source ID
///   sink ID
///   label ID NAME            (optional)
/// '#' starts a comment.
struct CutFile {
  CostlyCutInstance instance;
  std::vector<std::string> labels;  // per node; defaults to the 1-based id
};

CutFile parse_cut_file(const std::filesystem::path& path);
CutFile parse_cut_text(std::string_view text);

/// Clause list: optional `vars N` line, then one `a b c` triple per line.
struct ClauseFile {
  std::vector<Clause> clauses;
  std::size_t n_vars = 0;
};

ClauseFile parse_clause_file(const std::filesystem::path& path);
ClauseFile parse_clause_text(std::string_view text);

inline constexpr std::string_view kReportHeader =
    "measurement_id,kind,line_or_bus,index,exact,error_bound,method,attack_support";

/// One row per entry; ids 1-based, support ids joined by ';', missing bound
/// printed as "inf".
void write_report_csv(std::ostream& out, const IndexReport& report);

/// Rows `quantity,id,value` for theta, dz and residual_inf_norm.
void write_attack_csv(std::ostream& out, const IndexEntry& entry);

}  // namespace secidx
