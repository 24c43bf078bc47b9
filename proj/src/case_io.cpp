#include "secidx/case_io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "secidx/errors.hpp"

namespace secidx {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

template <typename Fn>
auto with_file_context(const std::filesystem::path& path, Fn fn) {
  try {
    return fn(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

[[noreturn]] void fail_at(const std::string& pointer, const std::string& message) {
  throw ParseError("at " + (pointer.empty() ? std::string("/") : pointer) + ": " + message);
}

Rational json_rational(const json& value, const std::string& pointer) {
  try {
    if (value.is_number_integer()) {
      if (value.is_number_unsigned() && value.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        fail_at(pointer, "integer out of range");
      }
      return Rational(value.get<std::int64_t>());
    }
    if (value.is_number_float()) return parse_rational(fmt::format("{}", value.get<double>()));
    if (value.is_string()) return parse_rational(value.get<std::string>());
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    fail_at(pointer, e.what());
  }
  fail_at(pointer, "expected a number or a \"p/q\" string");
}

double json_positive_real(const json& value, const std::string& pointer) {
  // Read floats directly so emitted shortest-form values round-trip exactly.
  if (value.is_number_float()) {
    const double x = value.get<double>();
    if (!(x > 0) || !std::isfinite(x)) fail_at(pointer, "reactance must be positive");
    return x;
  }
  const Rational r = json_rational(value, pointer);
  if (r <= 0) fail_at(pointer, "reactance must be positive");
  return to_double(r);
}

std::size_t json_id(const json& value, std::size_t limit, const std::string& pointer,
                    std::string_view what) {
  if (!value.is_number_integer()) fail_at(pointer, "expected an integer " + std::string(what) + " id");
  const auto id = value.get<std::int64_t>();
  if (id < 1 || static_cast<std::size_t>(id) > limit) {
    fail_at(pointer, std::string(what) + " " + std::to_string(id) + " does not exist (1.." +
                         std::to_string(limit) + ")");
  }
  return static_cast<std::size_t>(id - 1);
}

std::size_t key_id(const std::string& key, std::size_t limit, const std::string& pointer,
                   std::string_view what) {
  std::int64_t id = 0;
  const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
  if (ec != std::errc{} || end != key.data() + key.size()) {
    fail_at(pointer, "key '" + key + "' is not a " + std::string(what) + " id");
  }
  if (id < 1 || static_cast<std::size_t>(id) > limit) {
    fail_at(pointer, std::string(what) + " " + key + " does not exist (1.." + std::to_string(limit) + ")");
  }
  return static_cast<std::size_t>(id - 1);
}

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& pointer) {
  for (const auto& [key, _] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail_at(pointer, "unknown key '" + key + "'");
    }
  }
}

std::vector<std::size_t> id_list(const json& value, std::size_t limit, const std::string& pointer,
                                 std::string_view what) {
  std::vector<std::size_t> ids;
  if (value.is_string()) {
    if (value.get<std::string>() != "all") fail_at(pointer, "expected an id list or \"all\"");
    ids.resize(limit);
    for (std::size_t i = 0; i < limit; ++i) ids[i] = i;
    return ids;
  }
  if (!value.is_array()) fail_at(pointer, "expected an id list or \"all\"");
  for (std::size_t i = 0; i < value.size(); ++i) {
    ids.push_back(json_id(value[i], limit, pointer + "/" + std::to_string(i), what));
  }
  return ids;
}

struct PlacementSpec {
  std::vector<LineId> flow_from;
  std::vector<LineId> flow_to;
  std::vector<BusId> injection;
};

PlacementSpec parse_measurements(const json& value, std::size_t buses, std::size_t lines) {
  const std::string pointer = "/measurements";
  if (!value.is_object()) fail_at(pointer, "expected an object");
  reject_unknown_keys(value, {"flow_from", "flow_to", "injection"}, pointer);
  PlacementSpec spec;
  if (value.contains("flow_from")) spec.flow_from = id_list(value["flow_from"], lines, pointer + "/flow_from", "line");
  if (value.contains("flow_to")) spec.flow_to = id_list(value["flow_to"], lines, pointer + "/flow_to", "line");
  if (value.contains("injection")) spec.injection = id_list(value["injection"], buses, pointer + "/injection", "bus");
  return spec;
}

void parse_weights(const json& value, CaseFile& file) {
  const std::string pointer = "/weights";
  if (!value.is_object()) fail_at(pointer, "expected an object");
  reject_unknown_keys(value, {"edge_costs", "node_costs"}, pointer);
  auto read_map = [&](const char* key, std::size_t limit, std::string_view what, auto& target) {
    if (!value.contains(key)) return;
    const std::string sub = pointer + "/" + key;
    const json& map = value[key];
    if (!map.is_object()) fail_at(sub, "expected an object keyed by 1-based id");
    for (const auto& [k, v] : map.items()) {
      const std::size_t id = key_id(k, limit, sub, what);
      const Rational cost = json_rational(v, sub + "/" + k);
      if (cost < 0) fail_at(sub + "/" + k, "cost must be nonnegative");
      target[id] = cost;
    }
  };
  read_map("edge_costs", file.net.line_count(), "line", file.edge_cost_overrides);
  read_map("node_costs", file.net.bus_count(), "bus", file.node_cost_overrides);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string message = e.what();
    if (auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message);
  }
}

// Builds a placement, wrapping errors from the power model with their location.
MeasurementPlacement make_placement(const PowerNetwork& net, PlacementSpec spec) {
  try {
    return MeasurementPlacement(net, std::move(spec.flow_from), std::move(spec.flow_to),
                                std::move(spec.injection));
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    fail_at("/measurements", e.what());
  }
}

void apply_sidecar(const json& root, CaseFile& file) {
  if (!root.is_object()) fail_at("", "expected an object");
  reject_unknown_keys(root, {"measurements", "weights"}, "");
  if (root.contains("measurements")) {
    file.meas = make_placement(file.net, parse_measurements(root["measurements"], file.net.bus_count(),
                                                            file.net.line_count()));
  }
  if (root.contains("weights")) parse_weights(root["weights"], file);
}

std::string format_real(double value) { return fmt::format("{}", value); }

json rational_json(const Rational& r) {
  if (r.denominator() == 1) return r.numerator();
  return to_string(r);
}

json id_list_json(const std::vector<std::size_t>& ids, std::size_t limit) {
  if (ids.size() == limit && limit > 0) return "all";
  json out = json::array();
  for (std::size_t id : ids) out.push_back(id + 1);
  return out;
}

std::vector<long long> identity_ids(std::size_t n) {
  std::vector<long long> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<long long>(i + 1);
  return ids;
}

// Rows of the numeric matrix assigned to `mpc.<name>`.
std::vector<std::vector<double>> matpower_matrix(std::string_view text, const std::string& name) {
  const std::regex start("mpc\\." + name + "\\s*=\\s*\\[");
  std::match_results<std::string_view::const_iterator> match;
  if (!std::regex_search(text.begin(), text.end(), match, start)) {
    throw ParseError("missing matrix mpc." + name);
  }
  const std::size_t begin = static_cast<std::size_t>(match.position(0) + match.length(0));
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::size_t pos = begin;
  auto flush = [&] {
    if (!row.empty()) rows.push_back(std::move(row));
    row.clear();
  };
  while (true) {
    if (pos >= text.size()) throw ParseError("mpc." + name + " is not terminated by ']'");
    const char c = text[pos];
    if (c == ']') break;
    if (c == '%') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    if (c == ';' || c == '\n') {
      flush();
      ++pos;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < text.size() && std::string_view(" \t\r\n,;]%").find(text[end]) == std::string_view::npos) ++end;
    const std::string_view token = text.substr(pos, end - pos);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      const auto [line, column] = line_column(text, pos);
      throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                       ": non-numeric token '" + std::string(token) + "' in mpc." + name);
    }
    row.push_back(value);
    pos = end;
  }
  flush();
  return rows;
}

struct LineReader {
  std::istringstream stream;
  std::size_t number = 0;

  explicit LineReader(std::string_view text) : stream{std::string(text)} {}

  // Next non-empty line split into tokens; false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(stream, line)) {
      ++number;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream words(line);
      tokens.clear();
      for (std::string w; words >> w;) tokens.push_back(w);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("line " + std::to_string(number) + ": " + message);
  }

  long long integer(const std::string& token) const {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) fail("expected an integer, got '" + token + "'");
    return value;
  }

  NodeId node(const std::string& token, std::size_t n) const {
    const long long id = integer(token);
    if (n == 0) fail("'nodes' must come first");
    if (id < 1 || static_cast<std::size_t>(id) > n) fail("node " + token + " out of range 1.." + std::to_string(n));
    return static_cast<NodeId>(id - 1);
  }

  Rational cost(const std::string& token) const {
    try {
      const Rational r = parse_rational(token);
      if (r < 0) fail("cost must be nonnegative");
      return r;
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      fail(e.what());
    }
  }
};

}  // namespace

WeightAssignment CaseFile::weights() const {
  WeightAssignment w = WeightAssignment::from_placement(net, meas);
  for (const auto& [line, cost] : edge_cost_overrides) w.line_costs.at(line) = cost;
  for (const auto& [bus, cost] : node_cost_overrides) w.bus_costs.at(bus) = cost;
  return w;
}

CaseFile parse_native_text(std::string_view text) {
  const json root = parse_json(text);
  if (!root.is_object()) fail_at("", "expected an object");
  reject_unknown_keys(root, {"buses", "lines", "measurements", "weights"}, "");
  if (!root.contains("buses")) fail_at("", "missing key 'buses'");
  if (!root.contains("lines")) fail_at("", "missing key 'lines'");
  if (!root.contains("measurements")) fail_at("", "missing key 'measurements'");

  const json& buses = root["buses"];
  if (!buses.is_number_integer() || buses.get<std::int64_t>() < 1) {
    fail_at("/buses", "expected a positive integer");
  }
  const auto bus_count = static_cast<std::size_t>(buses.get<std::int64_t>());

  const json& lines = root["lines"];
  if (!lines.is_array()) fail_at("/lines", "expected an array of [from, to, reactance]");
  std::vector<Line> parsed;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string pointer = "/lines/" + std::to_string(i);
    const json& l = lines[i];
    if (!l.is_array() || l.size() != 3) fail_at(pointer, "expected [from, to, reactance]");
    const BusId from = json_id(l[0], bus_count, pointer + "/0", "bus");
    const BusId to = json_id(l[1], bus_count, pointer + "/1", "bus");
    if (from == to) fail_at(pointer, "line joins a bus to itself");
    parsed.push_back({from, to, json_positive_real(l[2], pointer + "/2")});
  }

  std::optional<PowerNetwork> net;
  try {
    net.emplace(bus_count, std::move(parsed));
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    fail_at("/lines", e.what());
  }

  CaseFile file{*net, MeasurementPlacement::empty(*net), {}, {}, identity_ids(bus_count)};
  file.meas = make_placement(file.net, parse_measurements(root["measurements"], bus_count, file.net.line_count()));
  if (root.contains("weights")) parse_weights(root["weights"], file);
  return file;
}

CaseFile parse_native(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& text) { return parse_native_text(text); });
}

std::string emit_native(const CaseFile& file) {
  std::ostringstream out;
  out << "{\n  \"buses\": " << file.net.bus_count() << ",\n  \"lines\": [";
  for (std::size_t i = 0; i < file.net.line_count(); ++i) {
    const Line& l = file.net.line(i);
    out << (i == 0 ? "\n" : ",\n") << "    [" << l.from + 1 << ", " << l.to + 1 << ", "
        << format_real(l.reactance) << "]";
  }
  out << "\n  ],\n  \"measurements\": {\n";
  out << "    \"flow_from\": " << id_list_json(file.meas.flow_from(), file.net.line_count()).dump() << ",\n";
  out << "    \"flow_to\": " << id_list_json(file.meas.flow_to(), file.net.line_count()).dump() << ",\n";
  out << "    \"injection\": " << id_list_json(file.meas.injection(), file.net.bus_count()).dump() << "\n  }";
  if (!file.edge_cost_overrides.empty() || !file.node_cost_overrides.empty()) {
    json weights = json::object();
    auto emit_map = [&](const char* key, const auto& overrides) {
      if (overrides.empty()) return;
      json map = json::object();
      for (const auto& [id, cost] : overrides) map[std::to_string(id + 1)] = rational_json(cost);
      weights[key] = map;
    };
    emit_map("edge_costs", file.edge_cost_overrides);
    emit_map("node_costs", file.node_cost_overrides);
    out << ",\n  \"weights\": " << weights.dump();
  }
  out << "\n}\n";
  return out.str();
}

CaseFile parse_matpower_text(std::string_view text) {
  const auto bus_rows = matpower_matrix(text, "bus");
  const auto branch_rows = matpower_matrix(text, "branch");
  if (bus_rows.empty()) throw ParseError("mpc.bus has no rows");

  std::map<long long, BusId> index;
  std::vector<long long> bus_ids;
  for (std::size_t r = 0; r < bus_rows.size(); ++r) {
    const double raw = bus_rows[r].front();
    const auto id = static_cast<long long>(raw);
    if (static_cast<double>(id) != raw) throw ParseError("mpc.bus row " + std::to_string(r + 1) + ": bus id is not an integer");
    if (!index.emplace(id, bus_ids.size()).second) {
      throw ParseError("mpc.bus row " + std::to_string(r + 1) + ": duplicate bus " + std::to_string(id));
    }
    bus_ids.push_back(id);
  }

  std::vector<Line> lines;
  for (std::size_t r = 0; r < branch_rows.size(); ++r) {
    const auto& row = branch_rows[r];
    const std::string where = "mpc.branch row " + std::to_string(r + 1);
    if (row.size() < 4) throw ParseError(where + ": needs at least 4 columns");
    if (row.size() >= 11 && row[10] == 0) continue;
    auto bus = [&](double raw) {
      const auto it = index.find(static_cast<long long>(raw));
      if (it == index.end() || static_cast<double>(it->first) != raw) {
        throw ParseError(where + ": unknown bus " + format_real(raw));
      }
      return it->second;
    };
    const BusId from = bus(row[0]);
    const BusId to = bus(row[1]);
    if (!(row[3] > 0)) throw ParseError(where + ": reactance must be positive");
    if (from == to) throw ParseError(where + ": branch joins a bus to itself");
    lines.push_back({from, to, row[3]});
  }

  std::optional<PowerNetwork> net;
  try {
    net.emplace(bus_ids.size(), std::move(lines));
  } catch (const InputError& e) {
    throw ParseError(std::string("mpc.branch: ") + e.what());
  }
  return CaseFile{*net, MeasurementPlacement::full(*net), {}, {}, std::move(bus_ids)};
}

CaseFile parse_matpower_subset(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& sidecar) {
  CaseFile file = with_file_context(path, [](const std::string& text) { return parse_matpower_text(text); });
  if (sidecar) {
    with_file_context(*sidecar, [&](const std::string& text) {
      apply_sidecar(parse_json(text), file);
      return 0;
    });
  }
  return file;
}

CaseFile load_case(const std::filesystem::path& path) {
  if (path.extension() == ".m") return parse_matpower_subset(path);
  return parse_native(path);
}

CutFile parse_cut_text(std::string_view text) {
  LineReader reader(text);
  std::size_t n = 0;
  std::vector<CostlyEdge> edges;
  std::vector<Rational> node_costs;
  std::vector<std::string> labels;
  std::optional<NodeId> source;
  std::optional<NodeId> sink;

  std::vector<std::string> t;
  while (reader.next(t)) {
    const std::string& key = t[0];
    auto arity = [&](std::size_t k) {
      if (t.size() != k + 1) reader.fail("'" + key + "' takes " + std::to_string(k) + " argument(s)");
    };
    if (key == "nodes") {
      arity(1);
      if (n != 0) reader.fail("duplicate 'nodes'");
      const long long count = reader.integer(t[1]);
      if (count < 2) reader.fail("need at least two nodes");
      n = static_cast<std::size_t>(count);
      node_costs.assign(n, Rational(0));
      labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i + 1);
    } else if (key == "edge") {
      arity(3);
      const NodeId from = reader.node(t[1], n);
      const NodeId to = reader.node(t[2], n);
      if (from == to) reader.fail("self-loop");
      edges.push_back({from, to, reader.cost(t[3])});
    } else if (key == "node") {
      arity(2);
      node_costs[static_cast<std::size_t>(reader.node(t[1], n))] = reader.cost(t[2]);
    } else if (key == "source" || key == "sink") {
      arity(1);
      auto& slot = key == "source" ? source : sink;
      if (slot) reader.fail("duplicate '" + key + "'");
      slot = reader.node(t[1], n);
    } else if (key == "label") {
      arity(2);
      labels[static_cast<std::size_t>(reader.node(t[1], n))] = t[2];
    } else {
      reader.fail("unknown directive '" + key + "'");
    }
  }
  if (n == 0) throw ParseError("missing 'nodes'");
  if (!source) throw ParseError("missing 'source'");
  if (!sink) throw ParseError("missing 'sink'");
  if (*source == *sink) throw ParseError("source and sink must differ");
  return {CostlyCutInstance(n, std::move(edges), std::move(node_costs), *source, *sink), std::move(labels)};
}

CutFile parse_cut_file(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& text) { return parse_cut_text(text); });
}

ClauseFile parse_clause_text(std::string_view text) {
  LineReader reader(text);
  ClauseFile out;
  std::optional<std::size_t> declared;
  std::size_t max_var = 0;
  std::vector<std::string> t;
  while (reader.next(t)) {
    if (t[0] == "vars") {
      if (t.size() != 2) reader.fail("'vars' takes one argument");
      if (declared || !out.clauses.empty()) reader.fail("'vars' must come first, once");
      const long long n = reader.integer(t[1]);
      if (n < 1) reader.fail("need at least one variable");
      declared = static_cast<std::size_t>(n);
      continue;
    }
    if (t.size() != 3) reader.fail("a clause has exactly three variables");
    Clause clause{};
    for (std::size_t i = 0; i < 3; ++i) {
      const long long v = reader.integer(t[i]);
      if (v < 1) reader.fail("variables are positive 1-based ids");
      if (declared && static_cast<std::size_t>(v) > *declared) reader.fail("variable " + t[i] + " exceeds 'vars'");
      clause[i] = static_cast<std::size_t>(v);
      max_var = std::max(max_var, clause[i]);
    }
    out.clauses.push_back(clause);
  }
  if (out.clauses.empty()) throw ParseError("no clauses");
  out.n_vars = declared.value_or(max_var);
  return out;
}

ClauseFile parse_clause_file(const std::filesystem::path& path) {
  return with_file_context(path, [](const std::string& text) { return parse_clause_text(text); });
}

void write_report_csv(std::ostream& out, const IndexReport& report) {
  out << kReportHeader << '\n';
  for (const IndexEntry& e : report.entries) {
    std::string support;
    for (std::size_t i = 0; i < e.attack.support.size(); ++i) {
      if (i > 0) support += ';';
      support += std::to_string(e.attack.support[i] + 1);
    }
    out << e.measurement + 1 << ',' << to_string(e.target.kind) << ',' << e.target.element + 1 << ','
        << to_string(e.index) << ',' << (e.exact ? "true" : "false") << ','
        << (e.error_bound ? to_string(*e.error_bound) : std::string("inf")) << ',' << to_string(e.method)
        << ',' << support << '\n';
  }
}

void write_attack_csv(std::ostream& out, const IndexEntry& entry) {
  out << "quantity,id,value\n";
  for (Eigen::Index i = 0; i < entry.attack.delta_theta.size(); ++i) {
    out << "theta," << i + 1 << ',' << format_real(entry.attack.delta_theta(i)) << '\n';
  }
  for (Eigen::Index i = 0; i < entry.attack.delta_z.size(); ++i) {
    out << "dz," << i + 1 << ',' << format_real(entry.attack.delta_z(i)) << '\n';
  }
  out << "residual_inf_norm,," << format_real(entry.attack.residual_norm) << '\n';
}

}  // namespace secidx
