#include "stockflow/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stockflow/adapter.hpp"
#include "stockflow/lp_io.hpp"

namespace stockflow::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_input(const std::string& msg) { throw std::invalid_argument(msg); }

std::int64_t parse_i64(const std::string& text, const std::string& where) {
  std::int64_t v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) bad_input(where + ": not an integer: '" + text + "'");
  return v;
}

}  // namespace

Rat64 parse_fraction(const std::string& text, const std::string& where) {
  try {
    size_t slash = text.find('/');
    if (slash == std::string::npos) return Rat64::parse(text);
    Rat64 num = Rat64::parse(text.substr(0, slash));
    Rat64 den = Rat64::parse(text.substr(slash + 1));
    if (den == Rat64(0)) bad_input(where + ": zero denominator in '" + text + "'");
    return num / den;
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    if (what.rfind(where, 0) == 0) throw;  // already carries the context
    bad_input(where + ": not a number: '" + text + "'");
  } catch (const RatOverflow&) {
    bad_input(where + ": number out of range: '" + text + "'");
  }
}

namespace {

std::string big_exact_str(const BigRat& r) {
  using boost::multiprecision::cpp_int;
  cpp_int n = numerator(r), d = denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

// --- JSON access with readable errors -------------------------------------

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) bad_input("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad_input(path.string() + ": " + e.what());
  }
}

const json& require_key(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) bad_input(where + ": missing \"" + std::string(key) + "\"");
  return *it;
}

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  if (!j.is_object()) bad_input(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) bad_input(where + ": unknown key \"" + item.key() + "\"");
  }
}

std::int64_t int_field(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad_input(where + ": expected an integer");
  return j.get<std::int64_t>();
}

std::string str_field(const json& j, const std::string& where) {
  if (!j.is_string()) bad_input(where + ": expected a string");
  return j.get<std::string>();
}

// Rationals in JSON are integers or strings like "0.5", "4/5"; floats are
// rejected so no value ever passes through a double.
Rat64 rat_field(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rat64(j.get<std::int64_t>());
  if (j.is_string()) return parse_fraction(j.get<std::string>(), where);
  bad_input(where + ": expected an integer or a number string (floats are not accepted)");
}

std::vector<std::vector<int>> id_groups(const json& j, const std::string& where) {
  if (!j.is_array()) bad_input(where + ": expected an array of id arrays");
  std::vector<std::vector<int>> out;
  for (const auto& row : j) {
    if (!row.is_array()) bad_input(where + ": expected an array of id arrays");
    std::vector<int> ids;
    for (const auto& v : row) ids.push_back((int)int_field(v, where));
    out.push_back(std::move(ids));
  }
  return out;
}

// --- CSV ------------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ',';
    s += parts[i];
  }
  return s;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) bad_input("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) bad_input(path.string() + ": empty file");
  if (split_csv_line(line) != header)
    bad_input(path.string() + ": expected header '" + join(header) + "', got '" + line + "'");
  std::vector<std::vector<std::string>> rows;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      bad_input(path.string() + ":" + std::to_string(lineno) + ": expected " +
                std::to_string(header.size()) + " columns");
    rows.push_back(std::move(fields));
  }
  return rows;
}

// --- network file ---------------------------------------------------------

std::vector<std::vector<Rat64>> distance_matrix(const json& j, size_t n,
                                                const std::string& where) {
  if (!j.is_array() || j.size() != n)
    bad_input(where + ": expected a " + std::to_string(n) + "x" + std::to_string(n) +
              " distance matrix");
  std::vector<std::vector<Rat64>> d(n);
  for (size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n)
      bad_input(where + ": row " + std::to_string(i + 1) + " has the wrong length");
    for (size_t k = 0; k < n; ++k) d[i].push_back(rat_field(j[i][k], where));
  }
  return d;
}

}  // namespace

NetworkFile load_network(const std::string& path,
                         const std::optional<std::string>& topology_override) {
  const std::string where = fs::path(path).filename().string();
  json j = read_json_file(path);
  if (!j.is_object()) bad_input(where + ": expected a JSON object");
  expect_keys(j,
              {"nodes", "topology", "distance", "arcs", "provincial_centers", "regional_center",
               "regions", "partition", "processing"},
              where);

  const json& jnodes = require_key(j, "nodes", where);
  if (!jnodes.is_array() || jnodes.empty()) bad_input(where + ": \"nodes\" must be a non-empty array");
  std::vector<Node> nodes;
  for (const auto& e : jnodes) {
    expect_keys(e, {"id", "label", "kind", "province", "icu_beds", "population_weight"}, where);
    Node nd;
    nd.id = (int)int_field(require_key(e, "id", where), where + ": node id");
    std::string label_default = "node" + std::to_string(nd.id);
    nd.label = e.contains("label") ? str_field(e["label"], where) : label_default;
    std::string kind = e.contains("kind") ? str_field(e["kind"], where) : "hospital";
    if (kind == "hospital")
      nd.kind = NodeKind::Hospital;
    else if (kind == "logistic_center")
      nd.kind = NodeKind::LogisticCenter;
    else
      bad_input(where + ": node " + std::to_string(nd.id) +
                ": kind must be \"hospital\" or \"logistic_center\"");
    nd.province = e.contains("province") ? str_field(e["province"], where) : "";
    nd.icu_beds = e.contains("icu_beds") ? int_field(e["icu_beds"], where) : 0;
    if (e.contains("population_weight"))
      nd.population_weight = rat_field(e["population_weight"], where);
    nodes.push_back(std::move(nd));
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id != (int)i + 1)
      bad_input(where + ": node ids must be 1.." + std::to_string(nodes.size()) +
                " with no gaps");

  std::string topology = "arcs";
  if (j.contains("topology")) topology = str_field(j["topology"], where);
  if (topology_override) topology = *topology_override;

  NetworkFile out;
  size_t n = nodes.size();
  if (topology == "complete") {
    auto dist = distance_matrix(require_key(j, "distance", where), n, where + ": distance");
    out.network = make_complete_graph(nodes, dist);
  } else if (topology == "lc") {
    auto dist = distance_matrix(require_key(j, "distance", where), n, where + ": distance");
    const json& jc = require_key(j, "provincial_centers", where);
    if (!jc.is_object()) bad_input(where + ": \"provincial_centers\" must map province to node id");
    std::map<std::string, int> centers;
    for (const auto& item : jc.items())
      centers[item.key()] = (int)int_field(item.value(), where + ": provincial_centers");
    std::optional<int> regional;
    if (j.contains("regional_center") && !j["regional_center"].is_null())
      regional = (int)int_field(j["regional_center"], where + ": regional_center");
    out.network = make_lc_graph(nodes, centers, regional, dist);
  } else if (topology == "arcs") {
    out.network.nodes = nodes;
    const json& ja = require_key(j, "arcs", where);
    if (!ja.is_array()) bad_input(where + ": \"arcs\" must be an array");
    for (const auto& e : ja) {
      expect_keys(e, {"from", "to", "weight"}, where + ": arc");
      Arc a;
      a.from = (int)int_field(require_key(e, "from", where), where + ": arc from");
      a.to = (int)int_field(require_key(e, "to", where), where + ": arc to");
      a.weight = rat_field(require_key(e, "weight", where), where + ": arc weight");
      out.network.arcs.push_back(a);
    }
  } else {
    bad_input(where + ": topology must be \"complete\", \"lc\" or \"arcs\"");
  }

  if (j.contains("regions")) out.network.regions = id_groups(j["regions"], where + ": regions");
  if (j.contains("partition"))
    out.network.partition = id_groups(j["partition"], where + ": partition");

  if (j.contains("processing")) {
    const json& jp = j["processing"];
    expect_keys(jp, {"kind", "amount"}, where + ": processing");
    std::string kind = jp.contains("kind") ? str_field(jp["kind"], where) : "flat";
    Rat64 amount =
        jp.contains("amount") ? rat_field(jp["amount"], where + ": processing amount") : Rat64(0);
    if (kind == "flat")
      out.processing = ProcessingRule::flat(amount);
    else if (kind == "per_hub")
      out.processing = ProcessingRule::per_hub(amount);
    else
      bad_input(where + ": processing kind must be \"flat\" or \"per_hub\"");
  }
  return out;
}

namespace {

// Per-node scalar-or-array profile field. Missing entries take the default;
// null array slots mean "no limit" where the profile allows that.
template <class T, class FromJson>
std::vector<T> profile_field(const json* j, size_t n, const std::vector<T>& defaults,
                             const std::string& where, FromJson from_json) {
  if (!j) return defaults;
  std::vector<T> out;
  if (j->is_array()) {
    if (j->size() != n)
      bad_input(where + ": expected " + std::to_string(n) + " entries, got " +
                std::to_string(j->size()));
    for (size_t i = 0; i < n; ++i)
      out.push_back(from_json((*j)[i], where + "[" + std::to_string(i + 1) + "]"));
  } else {
    T one = from_json(*j, where);
    out.assign(n, one);
  }
  return out;
}

std::int64_t count_field(const json& j, const std::string& where) {
  std::int64_t v = int_field(j, where);
  if (v < 0) bad_input(where + ": must be >= 0");
  return v;
}

std::optional<std::int64_t> opt_count_field(const json& j, const std::string& where) {
  if (j.is_null()) return std::nullopt;
  return count_field(j, where);
}

int out_degree(const DistributionNetwork& net, int id) {
  std::vector<int> seen;
  for (const auto& a : net.arcs)
    if (a.from == id && a.to != id) seen.push_back(a.to);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  return (int)seen.size();
}

}  // namespace

Instance load_manifest(const std::string& path,
                       const std::optional<std::string>& topology_override) {
  fs::path mpath(path);
  const std::string where = mpath.filename().string();
  json m = read_json_file(mpath);
  if (!m.is_object()) bad_input(where + ": expected a JSON object");
  expect_keys(m,
              {"network", "horizon", "demand", "probabilities", "profile", "extra_stock",
               "receipts", "share_mode", "relay_exempt"},
              where);
  fs::path dir = mpath.parent_path();
  auto resolve = [&dir](const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : dir / q;
  };

  NetworkFile nf =
      load_network(resolve(str_field(require_key(m, "network", where), where)).string(),
                   topology_override);
  Instance inst;
  inst.network = std::move(nf.network);
  size_t n = (size_t)inst.network.num_nodes();

  inst.horizon = (int)int_field(require_key(m, "horizon", where), where + ": horizon");
  if (inst.horizon < 1) bad_input(where + ": horizon must be >= 1");
  size_t q = (size_t)inst.horizon;

  // Scenario names and probabilities come first; the demand file refers to
  // the names and must cover every (node, period, scenario) cell exactly once.
  fs::path ppath = resolve(str_field(require_key(m, "probabilities", where), where));
  std::map<std::string, size_t> windex;
  for (const auto& row : read_csv(ppath, {"scenario", "p"})) {
    if (!windex.emplace(row[0], inst.scenarios.names.size()).second)
      bad_input(ppath.string() + ": duplicate scenario '" + row[0] + "'");
    inst.scenarios.names.push_back(row[0]);
    inst.scenarios.prob.push_back(parse_fraction(row[1], ppath.string()));
  }
  if (inst.scenarios.names.empty()) bad_input(ppath.string() + ": no scenarios");
  size_t nw = inst.scenarios.names.size();

  fs::path dpath = resolve(str_field(require_key(m, "demand", where), where));
  inst.scenarios.demand.assign(
      nw, std::vector<std::vector<std::int64_t>>(n, std::vector<std::int64_t>(q, -1)));
  for (const auto& row : read_csv(dpath, {"node_id", "period", "scenario", "demand"})) {
    std::int64_t i = parse_i64(row[0], dpath.string());
    std::int64_t t = parse_i64(row[1], dpath.string());
    auto wit = windex.find(row[2]);
    std::int64_t v = parse_i64(row[3], dpath.string());
    if (i < 1 || i > (std::int64_t)n) bad_input(dpath.string() + ": node " + row[0] + " unknown");
    if (t < 1 || t > (std::int64_t)q)
      bad_input(dpath.string() + ": period " + row[1] + " outside 1.." + std::to_string(q));
    if (wit == windex.end()) bad_input(dpath.string() + ": scenario '" + row[2] + "' unknown");
    if (v < 0) bad_input(dpath.string() + ": negative demand for node " + row[0]);
    auto& cell = inst.scenarios.demand[wit->second][(size_t)(i - 1)][(size_t)(t - 1)];
    if (cell != -1)
      bad_input(dpath.string() + ": duplicate cell node " + row[0] + " period " + row[1] +
                " scenario '" + row[2] + "'");
    cell = v;
  }
  for (size_t w = 0; w < nw; ++w)
    for (size_t i = 0; i < n; ++i)
      for (size_t t = 0; t < q; ++t)
        if (inst.scenarios.demand[w][i][t] == -1)
          bad_input(dpath.string() + ": missing demand for node " + std::to_string(i + 1) +
                    " period " + std::to_string(t + 1) + " scenario '" +
                    inst.scenarios.names[w] + "'");

  // Capacity profile. Defaults follow the usual case-study setup: stock and
  // storage scale with ICU beds, hospitals may send five shipments of up to
  // twenty units per period and share up to four fifths of their surplus.
  // Logistic centers get a delivery cap proportional to their degree and
  // unlimited storage.
  const json* prof = m.contains("profile") ? &m["profile"] : nullptr;
  if (prof) {
    expect_keys(*prof,
                {"initial_stock", "max_deliveries", "share_fraction", "max_shipment",
                 "storage_cap"},
                where + ": profile");
  }
  auto field = [&](const char* key) -> const json* {
    return prof && prof->contains(key) ? &(*prof)[key] : nullptr;
  };
  std::vector<std::int64_t> s0_def, ship_def;
  std::vector<std::optional<std::int64_t>> deliv_def, cap_def;
  std::vector<Rat64> share_def;
  for (size_t i = 0; i < n; ++i) {
    const Node& nd = inst.network.nodes[i];
    bool lc = nd.kind == NodeKind::LogisticCenter;
    s0_def.push_back(nd.icu_beds);
    deliv_def.push_back(lc ? std::max<std::int64_t>(
                                 1, Rat64(2 * out_degree(inst.network, nd.id), 5).round_nearest())
                           : 5);
    share_def.push_back(Rat64(4, 5));
    ship_def.push_back(20);
    cap_def.push_back(lc ? std::optional<std::int64_t>() : std::optional(2 * nd.icu_beds));
  }
  inst.profile.initial_stock =
      profile_field(field("initial_stock"), n, s0_def, where + ": initial_stock", count_field);
  inst.profile.max_deliveries = profile_field(field("max_deliveries"), n, deliv_def,
                                              where + ": max_deliveries", opt_count_field);
  inst.profile.share_fraction = profile_field(field("share_fraction"), n, share_def,
                                              where + ": share_fraction", rat_field);
  inst.profile.max_shipment =
      profile_field(field("max_shipment"), n, ship_def, where + ": max_shipment", count_field);
  inst.profile.storage_cap =
      profile_field(field("storage_cap"), n, cap_def, where + ": storage_cap", opt_count_field);

  size_t nk = inst.network.regions.size();
  inst.extra.amount.assign(nk, std::vector<std::int64_t>(q, 0));
  if (m.contains("extra_stock")) {
    const json& jx = m["extra_stock"];
    if (!jx.is_array()) bad_input(where + ": \"extra_stock\" must be an array");
    for (const auto& e : jx) {
      expect_keys(e, {"region", "period", "amount"}, where + ": extra_stock");
      std::int64_t k = int_field(require_key(e, "region", where), where + ": extra_stock region");
      std::int64_t t = int_field(require_key(e, "period", where), where + ": extra_stock period");
      std::int64_t v =
          count_field(require_key(e, "amount", where), where + ": extra_stock amount");
      if (k < 1 || k > (std::int64_t)nk)
        bad_input(where + ": extra_stock region " + std::to_string(k) +
                  " outside 1.." + std::to_string(nk));
      if (t < 1 || t > (std::int64_t)q)
        bad_input(where + ": extra_stock period " + std::to_string(t) + " outside the horizon");
      inst.extra.amount[(size_t)(k - 1)][(size_t)(t - 1)] += v;
    }
  }

  if (m.contains("receipts")) {
    const json& jr = m["receipts"];
    if (!jr.is_array()) bad_input(where + ": \"receipts\" must be an array");
    if (!jr.empty())
      inst.receipts.assign(n, std::vector<std::int64_t>(q, 0));
    for (const auto& e : jr) {
      expect_keys(e, {"node", "period", "amount"}, where + ": receipts");
      std::int64_t i = int_field(require_key(e, "node", where), where + ": receipts node");
      std::int64_t t = int_field(require_key(e, "period", where), where + ": receipts period");
      std::int64_t v = count_field(require_key(e, "amount", where), where + ": receipts amount");
      if (i < 1 || i > (std::int64_t)n)
        bad_input(where + ": receipts node " + std::to_string(i) + " unknown");
      if (t < 1 || t > (std::int64_t)q)
        bad_input(where + ": receipts period " + std::to_string(t) + " outside the horizon");
      inst.receipts[(size_t)(i - 1)][(size_t)(t - 1)] += v;
    }
  }

  if (m.contains("share_mode")) {
    std::string mode = str_field(m["share_mode"], where + ": share_mode");
    std::replace(mode.begin(), mode.end(), '-', '_');
    if (mode == "exact")
      inst.share_mode = ShareMode::Exact;
    else if (mode == "at_most")
      inst.share_mode = ShareMode::AtMost;
    else
      bad_input(where + ": share_mode must be \"exact\" or \"at_most\"");
  }

  if (m.contains("relay_exempt")) {
    const json& je = m["relay_exempt"];
    if (!je.is_array()) bad_input(where + ": \"relay_exempt\" must be an array of node ids");
    for (const auto& v : je)
      inst.relay_exempt.push_back((int)int_field(v, where + ": relay_exempt"));
  }

  inst.reach = build_reachability(inst.network, nf.processing);
  return inst;
}

// --- plan CSV -------------------------------------------------------------

void write_plan_csv(const Plan& plan, std::ostream& os) {
  os << "kind,i,j_or_k,t,amount\n";
  for (const auto& [key, v] : plan.x) {
    if (v == 0) continue;
    auto [i, j, t] = key;
    os << "ship," << i << "," << j << "," << t << "," << v << "\n";
  }
  for (const auto& [key, v] : plan.s) {
    if (v == 0) continue;
    auto [i, k, t] = key;
    os << "place," << i << "," << k << "," << t << "," << v << "\n";
  }
}

Plan read_plan_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) bad_input("plan: empty input");
  if (split_csv_line(line) != std::vector<std::string>{"kind", "i", "j_or_k", "t", "amount"})
    bad_input("plan: expected header 'kind,i,j_or_k,t,amount'");
  Plan plan;
  size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    std::string where = "plan line " + std::to_string(lineno);
    if (f.size() != 5) bad_input(where + ": expected 5 columns");
    int i = (int)parse_i64(f[1], where);
    int jk = (int)parse_i64(f[2], where);
    int t = (int)parse_i64(f[3], where);
    std::int64_t v = parse_i64(f[4], where);
    if (v < 0) bad_input(where + ": negative amount");
    if (f[0] != "ship" && f[0] != "place") bad_input(where + ": kind must be 'ship' or 'place'");
    if (v == 0) continue;
    auto& dst = f[0] == "ship" ? plan.x : plan.s;
    if (!dst.emplace(std::tuple(i, jk, t), v).second) bad_input(where + ": duplicate entry");
  }
  return plan;
}

// --- shared command plumbing ----------------------------------------------

namespace {

template <class F>
int guard(std::ostream& err, F body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

const char* family_tag(Family f) {
  switch (f) {
    case Family::WorstUnit: return "phi1";
    case Family::WorstUnitPeriod: return "phi2";
    case Family::WorstGroup: return "phi3";
    case Family::TotalExpected: return "phi4";
  }
  return "?";
}

// Loads the instance, applies command-line overrides and prints validation
// findings. Returns nothing when a fatal finding makes the run pointless.
std::optional<Instance> prepare_instance(const RunConfig& cfg, std::ostream& err) {
  Instance inst = load_manifest(cfg.manifest, cfg.graph_override);
  if (cfg.share_mode_override) inst.share_mode = *cfg.share_mode_override;
  if (cfg.relay_exempt_override) inst.relay_exempt = *cfg.relay_exempt_override;
  bool fatal = false;
  for (const auto& f : validate_instance(inst)) {
    err << (f.fatal ? "error: " : "warning: ") << f.message << "\n";
    fatal = fatal || f.fatal;
  }
  if (fatal) return std::nullopt;
  if (cfg.objective.family == Family::WorstGroup && inst.network.partition.empty()) {
    err << "error: criterion phi3 needs a fairness partition in the network file\n";
    return std::nullopt;
  }
  return inst;
}

milp::SolveOptions solve_options(const RunConfig& cfg) {
  milp::SolveOptions so;
  so.mode = cfg.mode;
  so.node_limit = cfg.node_limit;
  so.time_limit_s = cfg.time_limit_s;
  return so;
}

json rat_json(const BigRat& v) {
  json j;
  j["decimal"] = big_decimal_str(v);
  j["exact"] = big_exact_str(v);
  return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::string objective_name(const Objective& obj) {
  std::string s = family_tag(obj.family);
  if (obj.regret) s += "_regret";
  return s;
}

}  // namespace

int cmd_export_lp(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    if (cfg.splits != 0) bad_input("export works on the full-horizon model; drop --splits");
    auto inst = prepare_instance(cfg, err);
    if (!inst) return kUsage;
    milp::Model model;
    VariableIndex index;
    CompileOptions copts;
    copts.no_redistribution = cfg.no_redistribution;
    if (cfg.objective.regret) {
      CompiledRegret c = compile_regret(*inst, cfg.objective.family, solve_options(cfg), copts);
      model = std::move(c.model);
      index = std::move(c.index);
    } else {
      Compiled c = compile(*inst, cfg.objective, copts);
      model = std::move(c.model);
      index = std::move(c.index);
    }
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    fs::path lp = dir / "model.lp";
    fs::path sidecar = dir / "model_index.json";
    milp::write_lp_file(model, lp.string());
    {
      std::ofstream os(sidecar, std::ios::binary);
      if (!os) throw std::runtime_error("cannot write " + sidecar.string());
      write_index_sidecar(index, os);
    }
    out << "columns " << model.num_vars() << " rows " << model.num_rows() << "\n";
    out << "wrote " << lp.string() << "\n";
    out << "wrote " << sidecar.string() << "\n";
    return kOk;
  });
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.solver == RunConfig::Solver::LpExport) return cmd_export_lp(cfg, out, err);
  return guard(err, [&]() -> int {
    if (cfg.splits < 0) bad_input("--splits must be >= 0");
    if (cfg.splits > 0 && cfg.solver != RunConfig::Solver::Builtin)
      bad_input("the rolling heuristic runs on the builtin solver only");
    if (cfg.splits > 0 && cfg.no_redistribution)
      bad_input("--no-redistribution needs the full-horizon solve; drop --splits");
    if (cfg.solver == RunConfig::Solver::Adapter && cfg.adapter_cmd.empty())
      bad_input("--solver adapter needs --adapter-cmd");

    auto inst = prepare_instance(cfg, err);
    if (!inst) return kUsage;
    milp::SolveOptions so = solve_options(cfg);
    CompileOptions copts;
    copts.no_redistribution = cfg.no_redistribution;

    Plan plan;
    milp::Solution sol;
    std::vector<Rat64> baselines;
    std::string diag;
    std::string status_word;
    int rc = kOk;

    if (cfg.splits == 0) {
      milp::Model model;
      VariableIndex index;
      if (cfg.objective.regret) {
        CompiledRegret c = compile_regret(*inst, cfg.objective.family, so, copts);
        model = std::move(c.model);
        index = std::move(c.index);
        baselines = std::move(c.baselines.value);
      } else {
        Compiled c = compile(*inst, cfg.objective, copts);
        model = std::move(c.model);
        index = std::move(c.index);
      }
      if (cfg.solver == RunConfig::Solver::Adapter) {
        milp::AdapterConfig acfg;
        acfg.command = cfg.adapter_cmd;
        sol = milp::solve_with_adapter(model, acfg, so);
      } else {
        sol = milp::solve(model, so);
      }
      if (sol.status == milp::SolveStatus::Infeasible) {
        err << "error: no feasible plan exists for this instance\n";
        return kError;
      }
      if (sol.status == milp::SolveStatus::Unbounded) {
        err << "error: the model is unbounded; the instance data is inconsistent\n";
        return kError;
      }
      if (!sol.has_incumbent) {
        err << "error: hit the " << milp::to_string(sol.status)
            << " limit before finding any plan\n";
        return kError;
      }
      plan = decode_plan(index, sol.values);
      status_word = milp::to_string(sol.status);
      rc = sol.status == milp::SolveStatus::Optimal ? kOk : kIncumbentOnly;
    } else {
      HorizonSplit split = make_even_split(inst->horizon, cfg.splits);
      RollingResult rr = rolling_horizon_solve(*inst, cfg.objective, split, so);
      plan = std::move(rr.plan);
      diag = diagnostics_json(rr);
      status_word = "heuristic";
    }

    EvaluationReport rep = evaluate_plan(*inst, plan);
    if (cfg.splits > 0 && cfg.objective.regret) {
      // The glued plan is priced against the same perfect-information
      // benchmarks the exact model would use, not the per-window ones.
      CompiledRegret c = compile_regret(*inst, cfg.objective.family, so, copts);
      baselines = std::move(c.baselines.value);
    }
    BigRat value = cfg.objective.regret
                       ? regret_value(rep, cfg.objective.family, baselines)
                       : rep.plain[(size_t)cfg.objective.family];

    if (cfg.splits == 0 && value != sol.objective) {
      err << "error: solver value " << big_exact_str(sol.objective)
          << " disagrees with the recomputed plan value " << big_exact_str(value) << "\n";
      return kError;
    }
    if (!rep.feasible()) {
      // Cannot happen for a verified exact solve; a heuristic defect would
      // surface here. The outputs are still written for inspection.
      err << "error: the plan violates " << rep.violations.size()
          << " operating rule(s); see report.json\n";
      rc = kError;
    }

    std::optional<BaselineResult> base;
    if (cfg.with_baseline) base = solve_baseline_no_redistribution(*inst, cfg.objective, so);

    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    std::vector<fs::path> written;

    {
      std::ostringstream os;
      write_plan_csv(plan, os);
      write_text_file(dir / "plan.csv", os.str());
      written.push_back(dir / "plan.csv");
    }

    json report;
    report["objective"] = objective_name(cfg.objective);
    report["status"] = status_word;
    report["solver"] = cfg.solver == RunConfig::Solver::Adapter ? "adapter" : "builtin";
    report["mode"] = cfg.mode == milp::NumericMode::Rational ? "rational" : "floating";
    report["splits"] = cfg.splits;
    report["seed"] = cfg.seed;
    report["objective_value"] = rat_json(value);
    report["criteria"] = json::object();
    for (int f = 0; f < 4; ++f)
      report["criteria"][family_tag((Family)f)] = rat_json(rep.plain[(size_t)f]);
    if (cfg.objective.regret) {
      json jb = json::array();
      for (const auto& b : baselines) jb.push_back(rat_json(to_big(b)));
      report["regret_baselines"] = std::move(jb);
    }
    report["feasible"] = rep.feasible();
    json jv = json::array();
    for (const auto& v : rep.violations) {
      json e;
      e["constraint"] = v.constraint;
      e["unit"] = v.unit;
      e["period"] = v.period;
      e["scenario"] = v.scenario;
      e["slack"] = v.slack.str();
      e["detail"] = v.detail;
      jv.push_back(std::move(e));
    }
    report["violations"] = std::move(jv);
    std::int64_t shipped = 0, placed = 0;
    for (const auto& v : rep.redistributed) shipped += v;
    for (const auto& row : rep.placed)
      for (const auto& v : row) placed += v;
    report["totals"] = {{"redistributed", shipped}, {"placed", placed}};
    if (cfg.splits == 0) {
      json js;
      js["status"] = milp::to_string(sol.status);
      js["best_bound"] = rat_json(sol.best_bound);
      js["nodes"] = sol.stats.nodes;
      js["pivots"] = sol.stats.pivots;
      js["seconds"] = sol.stats.seconds;
      js["exact_fallback"] = sol.stats.exact_fallback;
      report["solve"] = std::move(js);
    }
    if (base) {
      json jb;
      jb["status"] = milp::to_string(base->solution.status);
      if (base->solution.has_incumbent)
        jb["objective_value"] = rat_json(base->solution.objective);
      report["baseline"] = std::move(jb);
    }
    write_text_file(dir / "report.json", report.dump(2) + "\n");
    written.push_back(dir / "report.json");

    const EvaluationReport* base_rep =
        base && base->solution.has_incumbent ? &base->report : nullptr;
    FigureTables figs = emit_figure_tables(*inst, rep, base_rep);
    write_text_file(dir / "ncd.csv", figs.ncd);
    write_text_file(dir / "stock.csv", figs.stock);
    write_text_file(dir / "redistributed.csv", figs.redistributed);
    write_text_file(dir / "shares.csv", figs.shares);
    for (const char* f : {"ncd.csv", "stock.csv", "redistributed.csv", "shares.csv"})
      written.push_back(dir / f);

    if (!diag.empty()) {
      write_text_file(dir / "diagnostics.json", diag + "\n");
      written.push_back(dir / "diagnostics.json");
    }

    out << "status " << status_word << "\n";
    out << "objective " << big_decimal_str(value) << "\n";
    for (const auto& p : written) out << "wrote " << p.string() << "\n";
    return rc;
  });
}

int cmd_generate_scenarios(const ScenarioCmdConfig& cfg, std::ostream& out, std::ostream& err) {
  return guard(err, [&]() -> int {
    if (cfg.real_demand_csv.empty() == cfg.cumulative_csv.empty())
      bad_input("give exactly one of --demand or --cumulative");
    NetworkFile nf = load_network(cfg.network_path, cfg.graph_override);
    size_t n = (size_t)nf.network.num_nodes();

    bool from_cumulative = !cfg.cumulative_csv.empty();
    if (from_cumulative && cfg.stay_length < 1)
      bad_input("--cumulative needs --stay >= 1 (periods an admission stays active)");
    fs::path src(from_cumulative ? cfg.cumulative_csv : cfg.real_demand_csv);
    const std::string value_col = from_cumulative ? "cumulative" : "demand";
    auto rows = read_csv(src, {"node_id", "period", value_col});

    int periods = 0;
    for (const auto& row : rows)
      periods = std::max(periods, (int)parse_i64(row[1], src.string()));
    if (periods < 1) bad_input(src.string() + ": no data rows");
    std::vector<std::vector<std::int64_t>> series(
        n, std::vector<std::int64_t>((size_t)periods, -1));
    for (const auto& row : rows) {
      std::int64_t i = parse_i64(row[0], src.string());
      std::int64_t t = parse_i64(row[1], src.string());
      std::int64_t v = parse_i64(row[2], src.string());
      if (i < 1 || i > (std::int64_t)n) bad_input(src.string() + ": node " + row[0] + " unknown");
      if (t < 1) bad_input(src.string() + ": period " + row[1] + " must be >= 1");
      if (v < 0) bad_input(src.string() + ": negative value for node " + row[0]);
      auto& cell = series[(size_t)(i - 1)][(size_t)(t - 1)];
      if (cell != -1)
        bad_input(src.string() + ": duplicate cell node " + row[0] + " period " + row[1]);
      cell = v;
    }
    for (size_t i = 0; i < n; ++i)
      for (int t = 0; t < periods; ++t)
        if (series[i][(size_t)t] == -1)
          bad_input(src.string() + ": missing value for node " + std::to_string(i + 1) +
                    " period " + std::to_string(t + 1));

    std::vector<std::vector<std::int64_t>> real =
        from_cumulative ? estimate_daily_demand_from_cumulative(series, cfg.stay_length)
                        : std::move(series);
    ScenarioSet set = generate_scenarios(real, nf.network, cfg.gen);

    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    {
      std::ostringstream os;
      os << "node_id,period,scenario,demand\n";
      for (size_t w = 0; w < set.names.size(); ++w)
        for (size_t i = 0; i < n; ++i)
          for (int t = 0; t < periods; ++t)
            os << (i + 1) << "," << (t + 1) << "," << set.names[w] << ","
               << set.demand[w][i][(size_t)t] << "\n";
      write_text_file(dir / "demand.csv", os.str());
    }
    {
      std::ostringstream os;
      os << "scenario,p\n";
      for (size_t w = 0; w < set.names.size(); ++w)
        os << set.names[w] << "," << set.prob[w].str() << "\n";
      write_text_file(dir / "probabilities.csv", os.str());
    }
    out << "scenarios";
    for (const auto& nm : set.names) out << " " << nm;
    out << "\n";
    out << "nodes " << n << " periods " << periods << "\n";
    out << "wrote " << (dir / "demand.csv").string() << "\n";
    out << "wrote " << (dir / "probabilities.csv").string() << "\n";
    return kOk;
  });
}

}  // namespace stockflow::cli
