#include "secidx/verify.hpp"

#include <algorithm>
#include <numeric>

#include "secidx/errors.hpp"
#include "secidx/oracle.hpp"
#include "secidx/security_index.hpp"

namespace secidx {

PowerNetwork random_network(std::mt19937_64& rng, std::size_t buses, std::size_t lines) {
  if (buses < 2) throw InputError("random network needs at least two buses");
  if (lines < buses - 1) throw InputError("random network needs at least buses - 1 lines");
  std::uniform_real_distribution<double> reactance(0.5, 2.0);
  std::vector<Line> out;
  out.reserve(lines);
  for (BusId b = 1; b < buses; ++b) {
    const BusId parent = std::uniform_int_distribution<BusId>(0, b - 1)(rng);
    out.push_back({parent, b, reactance(rng)});
  }
  std::uniform_int_distribution<BusId> any(0, buses - 1);
  while (out.size() < lines) {
    const BusId a = any(rng);
    const BusId b = any(rng);
    if (a != b) out.push_back({a, b, reactance(rng)});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return PowerNetwork(buses, std::move(out));
}

MeasurementPlacement random_placement(std::mt19937_64& rng, const PowerNetwork& net, double keep,
                                      bool observable) {
  std::bernoulli_distribution pick(keep);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<LineId> ff;
    std::vector<LineId> ft;
    std::vector<BusId> inj;
    for (LineId l = 0; l < net.line_count(); ++l) {
      if (pick(rng)) ff.push_back(l);
      if (pick(rng)) ft.push_back(l);
    }
    for (BusId b = 0; b < net.bus_count(); ++b) {
      if (pick(rng)) inj.push_back(b);
    }
    MeasurementPlacement meas(net, std::move(ff), std::move(ft), std::move(inj));
    if (!observable) return meas;
    if (meas.size() > 0 && is_observable(build_h(net, meas))) return meas;
  }
  throw InputError("no observable placement found in 1000 draws");
}

CaseFile random_case(std::mt19937_64& rng, const RandomCaseOptions& options) {
  if (options.min_buses < 2 || options.min_buses > options.max_buses) {
    throw InputError("invalid bus range for random cases");
  }
  const std::size_t buses = std::uniform_int_distribution<std::size_t>(options.min_buses, options.max_buses)(rng);
  const std::size_t min_lines = buses - 1;
  const std::size_t max_lines = std::max(min_lines, options.max_lines);
  const std::size_t lines = std::uniform_int_distribution<std::size_t>(min_lines, max_lines)(rng);
  PowerNetwork net = random_network(rng, buses, lines);
  MeasurementPlacement meas = options.keep >= 1.0 ? MeasurementPlacement::full(net)
                                                  : random_placement(rng, net, options.keep, options.observable);
  std::vector<long long> ids(buses);
  std::iota(ids.begin(), ids.end(), 1LL);
  return CaseFile{std::move(net), std::move(meas), {}, {}, std::move(ids)};
}

CostlyCutInstance random_cut_instance(std::mt19937_64& rng, std::size_t nodes, std::size_t max_edges,
                                      int max_cost, bool symmetric, bool two_sided) {
  if (nodes < 2) throw InputError("random cut instance needs at least two nodes");
  std::uniform_int_distribution<NodeId> any(0, static_cast<NodeId>(nodes) - 1);
  std::uniform_int_distribution<int> cost(0, max_cost);
  const std::size_t count = std::uniform_int_distribution<std::size_t>(0, max_edges)(rng);
  std::vector<CostlyEdge> edges;
  while (edges.size() < count) {
    const NodeId a = any(rng);
    const NodeId b = any(rng);
    if (a == b) continue;
    const Rational c = cost(rng);
    edges.push_back({a, b, c});
    if (symmetric) edges.push_back({b, a, c});
  }
  std::vector<Rational> out(nodes);
  for (Rational& p : out) p = cost(rng);
  NodeId s = any(rng);
  NodeId t = any(rng);
  while (t == s) t = any(rng);
  if (!two_sided) return CostlyCutInstance(nodes, std::move(edges), std::move(out), s, t);
  std::vector<Rational> in(nodes);
  for (Rational& p : in) p = cost(rng);
  return CostlyCutInstance::two_sided(nodes, std::move(edges), std::move(out), std::move(in), s, t);
}

bool VerifyReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

namespace {

class Check {
 public:
  explicit Check(std::string name) : result_{std::move(name), CheckStatus::Pass, {}} {}

  void fail(const std::string& detail) {
    if (result_.status != CheckStatus::Fail) result_.detail = detail;
    result_.status = CheckStatus::Fail;
  }
  void skip(const std::string& detail) {
    result_.status = CheckStatus::Skip;
    result_.detail = detail;
  }
  void count() { ++count_; }

  CheckResult finish() && {
    if (result_.status == CheckStatus::Pass) result_.detail = std::to_string(count_) + " checked";
    return std::move(result_);
  }

 private:
  CheckResult result_;
  std::size_t count_ = 0;
};

std::string measurement_name(const IndexEntry& e) {
  return "measurement " + std::to_string(e.measurement + 1);
}

}  // namespace

VerifyReport verify_case(const CaseFile& file, std::size_t max_buses) {
  const PowerNetwork& net = file.net;
  const WeightAssignment weights = file.weights();
  const IndexReport exact = index_all(net, file.meas, weights, Method::Exact, 1);
  const Exactness exactness = exactness_condition(net, file.meas, weights);
  const Rational bound = theorem2_bound(net, weights);

  Check unobservable("attack_unobservable");
  Check cost("attack_cost_matches_index");
  Check baselines("baselines_never_better");
  Check brute("auxiliary_cut_matches_brute_force");
  Check binary("binary_oracle_agrees");
  Check continuous("continuous_gap_within_bound");

  for (const Method method : {Method::IgnoreNodes, Method::FoldNodes}) {
    const IndexReport other = index_all(net, file.meas, weights, method, 1);
    for (std::size_t k = 0; k < exact.entries.size(); ++k) {
      baselines.count();
      if (other.entries[k].index < exact.entries[k].index) {
        baselines.fail(measurement_name(exact.entries[k]) + ": " + std::string(to_string(method)) +
                       " beats exact");
      }
    }
  }

  for (const IndexEntry& e : exact.entries) {
    unobservable.count();
    if (!(e.attack.residual_norm <= kResidualTolerance)) {
      unobservable.fail(measurement_name(e) + ": residual " + std::to_string(e.attack.residual_norm));
    }
    cost.count();
    if (weighted_attack_cost(net, weights, e.attack.delta_theta) != e.index) {
      cost.fail(measurement_name(e) + ": support cost differs from index");
    }
  }

  const bool small = net.bus_count() <= max_buses;
  const bool oracle_fits = net.line_count() + net.bus_count() <= kOracleMaxRows;
  if (!small || net.bus_count() > kBruteForceMaxNodes) {
    brute.skip("more than " + std::to_string(std::min(max_buses, kBruteForceMaxNodes)) + " buses");
  } else {
    for (LineId line = 0; line < net.line_count(); ++line) {
      const CostlyCutInstance inst = line_instance(net, weights, line, net.line(line).from);
      brute.count();
      if (solve(inst).objective != solve_brute_force(inst).objective) {
        brute.fail("line " + std::to_string(line + 1));
      }
    }
  }
  if (!small || net.bus_count() > kBinaryOracleMaxBuses) {
    binary.skip("more than " + std::to_string(std::min(max_buses, kBinaryOracleMaxBuses)) + " buses");
  }
  if (!small || !oracle_fits) {
    continuous.skip(!small ? "more than " + std::to_string(max_buses) + " buses"
                           : "more than " + std::to_string(kOracleMaxRows) + " oracle rows");
  }

  for (const IndexEntry& e : exact.entries) {
    if (!small) break;
    const bool injection = e.target.kind == MeasurementKind::Injection;
    if (net.bus_count() <= kBinaryOracleMaxBuses) {
      const OracleResult b = injection ? oracle_binary_bus(net, weights, e.target.element)
                                       : oracle_binary(net, weights, e.target.element);
      binary.count();
      if (!b.optimum || *b.optimum != e.index) binary.fail(measurement_name(e));
    }
    if (oracle_fits) {
      const OracleResult c = injection ? oracle_continuous_bus(net, weights, e.target.element)
                                       : oracle_continuous_line(net, weights, e.target.element);
      continuous.count();
      if (!c.optimum) {
        continuous.fail(measurement_name(e) + ": oracle infeasible");
        continue;
      }
      const Rational gap = e.index - *c.optimum;
      if (gap < 0 || gap > bound || (exactness.exact && gap != 0)) {
        continuous.fail(measurement_name(e) + ": index " + to_string(e.index) + ", oracle " +
                        to_string(*c.optimum) + ", bound " + to_string(bound));
      }
    }
  }

  VerifyReport report;
  for (Check* c : {&unobservable, &cost, &baselines, &brute, &binary, &continuous}) {
    report.checks.push_back(std::move(*c).finish());
  }
  return report;
}

}  // namespace secidx
