#include "helmflow/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace helmflow {

namespace {

using Json = nlohmann::ordered_json;

// MatPower 4.1 column positions (0-based).
enum BusCol { BUS_I = 0, BUS_TYPE, PD, QD, GS, BS };
enum GenCol { GEN_BUS = 0, PG, QG, QMAX, QMIN, VG, MBASE, GEN_STATUS };
enum BranchCol { F_BUS = 0, T_BUS, BR_R, BR_X, BR_B, RATE_A, RATE_B, RATE_C, TAP, SHIFT, BR_STATUS };

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Matches "mpc.<key>" at a token boundary ("mpc.gen" must not match "mpc.gencost").
bool has_key(const std::string& line, const std::string& key) {
  const auto pos = line.find(key);
  if (pos == std::string::npos) return false;
  const auto end = pos + key.size();
  if (end < line.size()) {
    const unsigned char c = static_cast<unsigned char>(line[end]);
    if (std::isalnum(c) || c == '_') return false;
  }
  return true;
}

std::vector<double> parse_row(const std::string& text, int line_no) {
  std::vector<double> row;
  const char* p = text.c_str();
  while (*p) {
    while (*p && (std::isspace(static_cast<unsigned char>(*p)) || *p == ';' || *p == ',')) ++p;
    if (!*p) break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) {
      std::string tok;
      while (*p && !std::isspace(static_cast<unsigned char>(*p))) tok += *p++;
      throw ParseError("case file line " + std::to_string(line_no) +
                       ": expected number, got '" + tok + "'");
    }
    row.push_back(v);
    p = end;
  }
  return row;
}

struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
};

void require_columns(const Table& t, std::size_t min_cols, const std::string& name) {
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() < min_cols)
      throw ParseError("case file line " + std::to_string(t.row_lines[r]) + ": " + name +
                       " row has " + std::to_string(t.rows[r].size()) + " columns, expected >= " +
                       std::to_string(min_cols));
  }
}

}  // namespace

const char* to_string(BusKind kind) {
  switch (kind) {
    case BusKind::Slack: return "slack";
    case BusKind::PQ: return "pq";
    case BusKind::PV: return "pv";
  }
  return "?";
}

int Network::index_of(int bus_id) const {
  for (int i = 0; i < bus_count(); ++i)
    if (buses[i].id == bus_id) return i;
  throw ValidationError("unknown bus id " + std::to_string(bus_id));
}

std::vector<int> Network::pq_indices() const {
  std::vector<int> out;
  for (int i = 0; i < bus_count(); ++i)
    if (buses[i].kind == BusKind::PQ) out.push_back(i);
  return out;
}

std::vector<int> Network::pv_indices() const {
  std::vector<int> out;
  for (int i = 0; i < bus_count(); ++i)
    if (buses[i].kind == BusKind::PV) out.push_back(i);
  return out;
}

void Network::validate() {
  if (buses.empty()) throw ValidationError("network has no buses");

  int slack_count = 0;
  std::size_t slack_pos = 0;
  std::unordered_set<int> seen;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (!seen.insert(buses[i].id).second)
      throw ValidationError("duplicate bus id " + std::to_string(buses[i].id));
    if (buses[i].kind == BusKind::Slack) {
      ++slack_count;
      slack_pos = i;
    }
    if (buses[i].kind == BusKind::PV && !(buses[i].v_mag_target > 0.0))
      throw ValidationError("PV bus " + std::to_string(buses[i].id) +
                            " has non-positive magnitude target");
  }
  if (slack_count == 0) throw ValidationError("no slack bus");
  if (slack_count > 1)
    throw ValidationError("multiple slack buses (" + std::to_string(slack_count) + ")");
  if (slack_pos != 0) std::rotate(buses.begin(), buses.begin() + slack_pos, buses.begin() + slack_pos + 1);

  std::unordered_map<int, int> index;
  for (int i = 0; i < bus_count(); ++i) index[buses[i].id] = i;

  std::vector<std::vector<int>> adj(buses.size());
  for (const auto& br : branches) {
    auto f = index.find(br.from);
    auto t = index.find(br.to);
    if (f == index.end() || t == index.end())
      throw ValidationError("branch " + std::to_string(br.from) + "-" + std::to_string(br.to) +
                            " references unknown bus");
    if (!br.in_service) continue;
    if (br.series_impedance == Complex(0.0, 0.0))
      throw ValidationError("branch " + std::to_string(br.from) + "-" + std::to_string(br.to) +
                            " has zero series impedance");
    adj[f->second].push_back(t->second);
    adj[t->second].push_back(f->second);
  }

  // Island check: every bus must reach the slack through in-service branches.
  std::vector<char> reached(buses.size(), 0);
  std::queue<int> frontier;
  frontier.push(0);
  reached[0] = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int k : adj[i])
      if (!reached[k]) {
        reached[k] = 1;
        frontier.push(k);
      }
  }
  for (int i = 0; i < bus_count(); ++i)
    if (!reached[i])
      throw ValidationError("bus " + std::to_string(buses[i].id) +
                            " is disconnected from the slack bus (island)");
}

Network parse_matpower(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  double base_mva = 0.0;
  bool have_base = false;
  Table bus_tab, gen_tab, branch_tab;
  Table* current = nullptr;
  std::string net_name;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    if (is_blank(line)) continue;

    if (current) {
      const auto close = line.find(']');
      std::string payload = close == std::string::npos ? line : line.substr(0, close);
      if (!is_blank(payload)) {
        current->rows.push_back(parse_row(payload, line_no));
        current->row_lines.push_back(line_no);
      }
      if (close != std::string::npos) current = nullptr;
      continue;
    }

    if (has_key(line, "function")) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::istringstream name_in(line.substr(eq + 1));
        name_in >> net_name;
      }
      continue;
    }
    if (has_key(line, "mpc.baseMVA")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("case file line " + std::to_string(line_no) + ": malformed baseMVA");
      auto row = parse_row(line.substr(eq + 1), line_no);
      if (row.size() != 1)
        throw ParseError("case file line " + std::to_string(line_no) + ": malformed baseMVA");
      base_mva = row[0];
      have_base = true;
      continue;
    }

    Table* target = nullptr;
    if (has_key(line, "mpc.bus")) target = &bus_tab;
    else if (has_key(line, "mpc.gen")) target = &gen_tab;
    else if (has_key(line, "mpc.branch")) target = &branch_tab;
    if (target) {
      const auto open = line.find('[');
      if (open == std::string::npos)
        throw ParseError("case file line " + std::to_string(line_no) + ": expected '[' to open table");
      current = target;
      std::string rest = line.substr(open + 1);
      const auto close = rest.find(']');
      std::string payload = close == std::string::npos ? rest : rest.substr(0, close);
      if (!is_blank(payload)) {
        current->rows.push_back(parse_row(payload, line_no));
        current->row_lines.push_back(line_no);
      }
      if (close != std::string::npos) current = nullptr;
      continue;
    }
    // Other mpc fields (gencost, areas, version, ...) are ignored.
  }

  if (!have_base) throw ParseError("case file: missing mpc.baseMVA");
  if (bus_tab.rows.empty()) throw ParseError("case file: missing or empty mpc.bus table");
  if (branch_tab.rows.empty()) throw ParseError("case file: missing or empty mpc.branch table");
  require_columns(bus_tab, 13, "bus");
  if (!gen_tab.rows.empty()) require_columns(gen_tab, 10, "gen");
  require_columns(branch_tab, 11, "branch");
  if (!(base_mva > 0.0)) throw ParseError("case file: baseMVA must be positive");

  Network net;
  net.name = net_name;
  net.base_mva = base_mva;

  // Aggregate in-service generation per bus.
  struct GenAgg {
    double pg = 0.0, qg = 0.0, vg = 1.0;
    bool any = false;
  };
  std::unordered_map<int, GenAgg> gens;
  for (const auto& row : gen_tab.rows) {
    if (row[GEN_STATUS] <= 0.0) continue;
    auto& agg = gens[static_cast<int>(row[GEN_BUS])];
    agg.pg += row[PG];
    agg.qg += row[QG];
    if (!agg.any) agg.vg = row[VG];
    agg.any = true;
  }

  for (std::size_t r = 0; r < bus_tab.rows.size(); ++r) {
    const auto& row = bus_tab.rows[r];
    Bus bus;
    bus.id = static_cast<int>(row[BUS_I]);
    const int type = static_cast<int>(row[BUS_TYPE]);
    const auto gen = gens.find(bus.id);
    const bool has_gen = gen != gens.end();
    switch (type) {
      case 1: bus.kind = BusKind::PQ; break;
      case 2: bus.kind = has_gen ? BusKind::PV : BusKind::PQ; break;
      case 3: bus.kind = BusKind::Slack; break;
      case 4:
        throw ValidationError("bus " + std::to_string(bus.id) + " is marked isolated (island)");
      default:
        throw ParseError("case file line " + std::to_string(bus_tab.row_lines[r]) +
                         ": unknown bus type " + std::to_string(type));
    }
    bus.p_inj = ((has_gen ? gen->second.pg : 0.0) - row[PD]) / base_mva;
    bus.q_inj = ((has_gen ? gen->second.qg : 0.0) - row[QD]) / base_mva;
    bus.shunt = Complex(row[GS], row[BS]) / base_mva;
    if (bus.kind == BusKind::PV) bus.v_mag_target = gen->second.vg;
    net.buses.push_back(bus);
  }

  for (const auto& row : branch_tab.rows) {
    Branch br;
    br.from = static_cast<int>(row[F_BUS]);
    br.to = static_cast<int>(row[T_BUS]);
    br.series_impedance = Complex(row[BR_R], row[BR_X]);
    br.line_charging = row[BR_B];
    br.tap_ratio = row[TAP];
    br.phase_shift_deg = row[SHIFT];
    br.in_service = row[BR_STATUS] > 0.0;
    net.branches.push_back(br);
  }

  net.validate();
  return net;
}

Network parse_network_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "helmflow-network")
      throw ParseError("network JSON: missing format tag 'helmflow-network'");
    if (doc.value("schema", 0) != 1)
      throw ParseError("network JSON: unsupported schema version");
    Network net;
    net.name = doc.value("name", "");
    net.base_mva = doc.at("base_mva").get<double>();
    for (const auto& jb : doc.at("buses")) {
      Bus bus;
      bus.id = jb.at("id").get<int>();
      const std::string kind = jb.at("kind").get<std::string>();
      if (kind == "slack") bus.kind = BusKind::Slack;
      else if (kind == "pq") bus.kind = BusKind::PQ;
      else if (kind == "pv") bus.kind = BusKind::PV;
      else throw ParseError("network JSON: unknown bus kind '" + kind + "'");
      bus.p_inj = jb.at("p").get<double>();
      bus.q_inj = jb.at("q").get<double>();
      bus.v_mag_target = jb.value("v_set", 1.0);
      bus.shunt = Complex(jb.value("gs", 0.0), jb.value("bs", 0.0));
      net.buses.push_back(bus);
    }
    for (const auto& jb : doc.at("branches")) {
      Branch br;
      br.from = jb.at("from").get<int>();
      br.to = jb.at("to").get<int>();
      br.series_impedance = Complex(jb.at("r").get<double>(), jb.at("x").get<double>());
      br.line_charging = jb.value("b", 0.0);
      br.tap_ratio = jb.value("tap", 0.0);
      br.phase_shift_deg = jb.value("shift_deg", 0.0);
      br.in_service = jb.value("status", 1) != 0;
      net.branches.push_back(br);
    }
    net.validate();
    return net;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
}

Network parse_case(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? parse_network_json(text) : parse_matpower(text);
  }
  throw ParseError("empty case text");
}

Network load_case_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open case file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Network net = parse_case(buf.str());
  if (net.name.empty()) {
    auto slash = path.find_last_of("/\\");
    auto base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    net.name = dot == std::string::npos ? base : base.substr(0, dot);
  }
  return net;
}

std::string network_to_json(const Network& net) {
  Json doc;
  doc["format"] = "helmflow-network";
  doc["schema"] = 1;
  doc["name"] = net.name;
  doc["base_mva"] = net.base_mva;
  doc["buses"] = Json::array();
  for (const auto& bus : net.buses) {
    Json jb;
    jb["id"] = bus.id;
    jb["kind"] = to_string(bus.kind);
    jb["p"] = bus.p_inj;
    jb["q"] = bus.q_inj;
    jb["v_set"] = bus.v_mag_target;
    jb["gs"] = bus.shunt.real();
    jb["bs"] = bus.shunt.imag();
    doc["buses"].push_back(std::move(jb));
  }
  doc["branches"] = Json::array();
  for (const auto& br : net.branches) {
    Json jb;
    jb["from"] = br.from;
    jb["to"] = br.to;
    jb["r"] = br.series_impedance.real();
    jb["x"] = br.series_impedance.imag();
    jb["b"] = br.line_charging;
    jb["tap"] = br.tap_ratio;
    jb["shift_deg"] = br.phase_shift_deg;
    jb["status"] = br.in_service ? 1 : 0;
    doc["branches"].push_back(std::move(jb));
  }
  return doc.dump(2) + "\n";
}

Network convert_pv_to_pq(const Network& net, const std::map<int, double>& q_by_bus) {
  Network out = net;
  for (auto& bus : out.buses) {
    if (bus.kind != BusKind::PV) continue;
    const auto it = q_by_bus.find(bus.id);
    if (it == q_by_bus.end())
      throw ValidationError("convert_pv_to_pq: missing reactive injection for PV bus " +
                            std::to_string(bus.id));
    bus.kind = BusKind::PQ;
    bus.q_inj = it->second;
  }
  out.validate();
  return out;
}

AdmittanceMatrix build_ybus(const Network& net) {
  const int n = net.bus_count();
  AdmittanceMatrix y;
  y.full = Eigen::MatrixXcd::Zero(n, n);

  for (const auto& br : net.branches) {
    if (!br.in_service) continue;
    const int f = net.index_of(br.from);
    const int t = net.index_of(br.to);
    const Complex ys = 1.0 / br.series_impedance;
    const Complex ych(0.0, br.line_charging / 2.0);
    const double ratio = br.tap_ratio == 0.0 ? 1.0 : br.tap_ratio;
    const double shift = br.phase_shift_deg * std::numbers::pi / 180.0;
    const Complex tap = std::polar(ratio, shift);

    y.full(f, f) += (ys + ych) / (ratio * ratio);
    y.full(f, t) += -ys / std::conj(tap);
    y.full(t, f) += -ys / tap;
    y.full(t, t) += ys + ych;
  }
  for (int i = 0; i < n; ++i) y.full(i, i) += net.buses[i].shunt;

  y.row_sums = y.full.rowwise().sum();
  y.g = y.full.real();
  y.b = y.full.imag();
  y.reduced = y.full.bottomRightCorner(n - 1, n - 1);

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(y.reduced);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  const double smallest = pivots.minCoeff();
  if (!(largest > 0.0) || smallest <= 1e-10 * largest)
    throw ValidationError("reduced admittance matrix is singular (Assumption 1 violated): "
                          "smallest pivot " + std::to_string(smallest));
  return y;
}

}  // namespace helmflow
