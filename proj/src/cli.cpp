#include "secidx/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "secidx/case_io.hpp"
#include "secidx/errors.hpp"
#include "secidx/oracle.hpp"
#include "secidx/security_index.hpp"
#include "secidx/verify.hpp"

namespace secidx {

namespace {

struct CaseArgs {
  std::string path;
  std::string sidecar;

  CaseFile load() const {
    if (!sidecar.empty()) {
      if (std::filesystem::path(path).extension() != ".m") throw InputError("--placement applies to MATPOWER input only");
      return parse_matpower_subset(path, std::filesystem::path(sidecar));
    }
    return load_case(path);
  }
};

void add_case_args(CLI::App* cmd, CaseArgs& args) {
  cmd->add_option("case", args.path, "Case file (.json native, .m MATPOWER)")->required();
  cmd->add_option("--placement", args.sidecar, "JSON with measurements/weights for a MATPOWER case");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write " + path);
  return file;
}

std::size_t measurement_index(const CaseFile& file, long long id) {
  if (id < 1 || static_cast<std::size_t>(id) > file.meas.size()) {
    throw InputError(fmt::format("measurement {} does not exist (1..{})", id, file.meas.size()));
  }
  return static_cast<std::size_t>(id - 1);
}

std::string join_nodes(const std::vector<NodeId>& nodes, const std::vector<std::string>& labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) out += ", ";
    out += labels[static_cast<std::size_t>(nodes[i])];
  }
  return out + "}";
}

// Positive one-in-three satisfiability by enumeration.
bool one_in_three_satisfiable(const std::vector<Clause>& clauses, std::size_t n_vars) {
  if (n_vars > 24) throw InputError("assignment enumeration limited to 24 variables");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_vars); ++mask) {
    const bool ok = std::all_of(clauses.begin(), clauses.end(), [&](const Clause& c) {
      int trues = 0;
      for (std::size_t v : c) trues += static_cast<int>((mask >> (v - 1)) & 1);
      return trues == 1;
    });
    if (ok) return true;
  }
  return false;
}

int cmd_index(const CaseArgs& args, long long target, const std::string& method_name,
              const std::string& out_path, unsigned threads, std::ostream& out) {
  const CaseFile file = args.load();
  const Method method = parse_method(method_name);
  const WeightAssignment weights = file.weights();
  IndexReport report;
  if (target > 0) {
    report.entries.push_back(index_measurement(file.net, file.meas, weights, measurement_index(file, target), method));
  } else {
    report = index_all(file.net, file.meas, weights, method, threads);
  }
  if (out_path.empty()) {
    write_report_csv(out, report);
  } else {
    std::ofstream file_out = open_output(out_path);
    write_report_csv(file_out, report);
    fmt::print(out, "wrote {} rows to {}\n", report.entries.size(), out_path);
  }
  return kExitOk;
}

int print_verify(const VerifyReport& report, std::ostream& out) {
  for (const CheckResult& c : report.checks) fmt::print(out, "{} {}: {}\n", to_string(c.status), c.name, c.detail);
  return report.passed() ? kExitOk : kExitInvariant;
}

int cmd_verify(const CaseArgs& args, std::size_t random, std::uint64_t seed, std::size_t max_size,
               double keep, std::ostream& out) {
  if (random == 0) {
    if (args.path.empty()) throw InputError("verify needs a case file or --random N");
    return print_verify(verify_case(args.load(), max_size), out);
  }
  if (!args.path.empty()) throw InputError("give either a case file or --random, not both");
  if (max_size < 2) throw InputError("--max-size must be at least 2");
  std::mt19937_64 rng(seed);
  RandomCaseOptions options;
  options.max_buses = max_size;
  options.max_lines = max_size + max_size / 2;
  options.keep = keep;

  VerifyReport merged;
  std::size_t failed_cases = 0;
  for (std::size_t i = 0; i < random; ++i) {
    const VerifyReport report = verify_case(random_case(rng, options), max_size);
    if (!report.passed()) ++failed_cases;
    if (merged.checks.empty()) {
      merged = report;
      continue;
    }
    for (std::size_t c = 0; c < report.checks.size(); ++c) {
      CheckResult& m = merged.checks[c];
      const CheckResult& r = report.checks[c];
      if (r.status == CheckStatus::Fail && m.status != CheckStatus::Fail) {
        m.status = CheckStatus::Fail;
        m.detail = fmt::format("case {}: {}", i + 1, r.detail);
      } else if (r.status == CheckStatus::Pass && m.status == CheckStatus::Skip) {
        m.status = CheckStatus::Pass;
      }
    }
  }
  for (CheckResult& c : merged.checks) {
    if (c.status == CheckStatus::Pass) c.detail = fmt::format("{} cases", random);
  }
  const int code = print_verify(merged, out);
  fmt::print(out, "{} of {} cases passed (seed {})\n", random - failed_cases, random, seed);
  return code;
}

int cmd_attack(const CaseArgs& args, long long target, const std::string& method_name,
               const std::string& out_path, std::ostream& out) {
  const CaseFile file = args.load();
  const IndexEntry entry = index_measurement(file.net, file.meas, file.weights(),
                                             measurement_index(file, target), parse_method(method_name));
  if (out_path.empty()) {
    write_attack_csv(out, entry);
  } else {
    std::ofstream file_out = open_output(out_path);
    write_attack_csv(file_out, entry);
    fmt::print(out, "index {} (exact={}), residual {}, wrote {}\n", to_string(entry.index),
               entry.exact ? "true" : "false", entry.attack.residual_norm, out_path);
  }
  return kExitOk;
}

int cmd_cut(const std::string& path, const std::string& method_name, const std::string& aux_path,
            std::ostream& out) {
  const CutFile file = parse_cut_file(path);
  const Method method = parse_method(method_name);
  const CostlyCutSolution sol = solve_with(file.instance, method);
  fmt::print(out, "method {}\n", to_string(method));
  fmt::print(out, "objective {}\n", to_string(sol.objective));
  fmt::print(out, "exact {}\n", method == Method::Exact ? "true" : "false");
  fmt::print(out, "source_side {}\n", join_nodes(sol.source_side, file.labels));
  fmt::print(out, "sink_side {}\n", join_nodes(sol.sink_side, file.labels));
  std::string cut;
  for (std::size_t i = 0; i < sol.cut_edges.size(); ++i) {
    const CostlyEdge& e = file.instance.edges()[sol.cut_edges[i]];
    cut += fmt::format("{}{}->{}", i > 0 ? ", " : "", file.labels[static_cast<std::size_t>(e.from)],
                       file.labels[static_cast<std::size_t>(e.to)]);
  }
  fmt::print(out, "cut_edges {{{}}}\n", cut);
  fmt::print(out, "charged_nodes {}\n", join_nodes(sol.charged_nodes, file.labels));
  if (!aux_path.empty()) {
    std::ofstream aux_out = open_output(aux_path);
    write_auxiliary_text(aux_out, build_auxiliary(file.instance));
  }
  return kExitOk;
}

int cmd_gadget(const std::string& path, std::ostream& out) {
  const ClauseFile clauses = parse_clause_file(path);
  const SatGadget gadget = build_3sat_gadget(clauses.clauses, clauses.n_vars);
  const ModelMatrix h = build_h(gadget.net, gadget.meas);
  if (static_cast<std::size_t>(h.rows()) > kOracleMaxRows) {
    throw InputError(fmt::format("gadget has {} measurements; the oracle handles at most {}", h.rows(), kOracleMaxRows));
  }
  const OracleResult result = oracle_continuous(h, {gadget.target, Relation::EqualsOne});
  if (!result.optimum) throw InvariantError("gadget target admits no attack");
  const Rational threshold(static_cast<std::int64_t>(gadget.n_vars + 1));
  const bool gadget_says = *result.optimum == threshold;
  if (*result.optimum < threshold) throw InvariantError("gadget optimum below n + 1");
  const bool enumeration_says = one_in_three_satisfiable(clauses.clauses, clauses.n_vars);

  fmt::print(out, "variables {}\nclauses {}\nbuses {}\nmeasurements {}\n", gadget.n_vars,
             gadget.n_clauses, gadget.net.bus_count(), h.rows());
  fmt::print(out, "target_measurement {}\n", gadget.target + 1);
  fmt::print(out, "oracle_optimum {}\nthreshold {}\n", to_string(*result.optimum), to_string(threshold));
  fmt::print(out, "verdict {}\n", gadget_says ? "satisfiable" : "unsatisfiable");
  fmt::print(out, "enumeration {}\n", enumeration_says ? "satisfiable" : "unsatisfiable");
  if (gadget_says != enumeration_says) throw InvariantError("gadget verdict contradicts assignment enumeration");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Security index of DC state-estimation measurements via costly-node min cuts", "secidx"};
  app.require_subcommand(1);

  CaseArgs index_case;
  long long index_target = 0;
  bool index_all_flag = false;
  std::string index_method = "exact";
  std::string index_out;
  unsigned index_threads = 0;
  CLI::App* index = app.add_subcommand("index", "Security index per measurement, CSV report");
  add_case_args(index, index_case);
  auto* target_opt = index->add_option("--target", index_target, "Measurement id (1-based, global order)")
                         ->check(CLI::PositiveNumber);
  index->add_flag("--all", index_all_flag, "Every measurement (default)")->excludes(target_opt);
  index->add_option("--method", index_method, "exact | ignore-nodes | fold-nodes");
  index->add_option("--out", index_out, "Write the CSV here instead of stdout");
  index->add_option("--threads", index_threads, "Worker threads, 0 = hardware concurrency");

  CaseArgs verify_args;
  std::size_t verify_random = 0;
  std::uint64_t verify_seed = 1;
  std::size_t verify_max = 10;
  double verify_keep = 1.0;
  CLI::App* verify = app.add_subcommand("verify", "Oracle cross-checks, one line per property");
  verify->add_option("case", verify_args.path, "Case file");
  verify->add_option("--placement", verify_args.sidecar, "JSON with measurements/weights for a MATPOWER case");
  verify->add_option("--random", verify_random, "Check N seeded random cases instead of a file");
  verify->add_option("--seed", verify_seed, "Seed for --random");
  verify->add_option("--max-size", verify_max, "Bus limit for oracle checks and random cases");
  verify->add_option("--keep", verify_keep, "Metering probability for random cases (1 = full)")
      ->check(CLI::Range(0.0, 1.0));

  CaseArgs attack_case;
  long long attack_target = 0;
  std::string attack_method = "exact";
  std::string attack_out;
  CLI::App* attack = app.add_subcommand("attack", "Attack vector for one measurement");
  add_case_args(attack, attack_case);
  attack->add_option("--target", attack_target, "Measurement id (1-based)")->required()->check(CLI::PositiveNumber);
  attack->add_option("--method", attack_method, "exact | ignore-nodes | fold-nodes");
  attack->add_option("--out", attack_out, "Write the CSV here instead of stdout");

  std::string cut_path;
  std::string cut_method = "exact";
  std::string cut_aux;
  CLI::App* cut = app.add_subcommand("cut", "Solve a min cut instance with costly nodes");
  cut->add_option("instance", cut_path, "Instance text file")->required();
  cut->add_option("--method", cut_method, "exact | ignore-nodes | fold-nodes");
  cut->add_option("--aux-out", cut_aux, "Write the auxiliary graph here");

  std::string gadget_path;
  CLI::App* gadget = app.add_subcommand("gadget", "One-in-three 3SAT gadget verdict");
  gadget->add_option("--clauses", gadget_path, "Clause file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*index) return cmd_index(index_case, index_target, index_method, index_out, index_threads, out);
    if (*verify) return cmd_verify(verify_args, verify_random, verify_seed, verify_max, verify_keep, out);
    if (*attack) return cmd_attack(attack_case, attack_target, attack_method, attack_out, out);
    if (*cut) return cmd_cut(cut_path, cut_method, cut_aux, out);
    if (*gadget) return cmd_gadget(gadget_path, out);
  } catch (const InputError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  } catch (const OverflowError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  } catch (const InvariantError& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kExitInvariant;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kExitInvariant;
  }
  return kExitInputError;
}

}  // namespace secidx
