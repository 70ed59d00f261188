#include "safer/thrusters.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

namespace safer {

namespace {

constexpr std::array<std::string_view, kThrusterCount> kNames{
    "B1",  "B2",  "B3",  "B4",  "F1",  "F2",  "F3",  "F4",  "L1F", "L1R", "L3F", "L3R",
    "R2F", "R2R", "R4F", "R4R", "U1F", "U1R", "U3F", "U3R", "D2F", "D2R", "D4F", "D4R"};

// Wrench components: force x, y, z then torque x (roll), y (pitch), z (yaw).
using Components = std::array<double, 6>;

Components components(const Wrench& w) {
  return {w.force.x, w.force.y, w.force.z, w.torque.x, w.torque.y, w.torque.z};
}

struct GroupAxes {
  std::array<int, 3> commanded;  // component per triple slot
  std::array<int, 3> off_group;
};

GroupAxes axes_of(ThrusterGroup g) {
  if (g == ThrusterGroup::BF) return {{0, 4, 5}, {1, 2, 3}};
  return {{1, 2, 3}, {0, 4, 5}};
}

constexpr double kZeroTol = 1e-9;

}  // namespace

std::string_view to_string(ThrusterName name) { return kNames[index_of(name)]; }

std::optional<ThrusterName> parse_thruster_name(std::string_view text) {
  for (int i = 0; i < kThrusterCount; ++i)
    if (kNames[i] == text) return thruster_at(i);
  return std::nullopt;
}

int ThrusterSet::size() const { return std::popcount(bits_); }

std::vector<ThrusterName> ThrusterSet::members() const {
  std::vector<ThrusterName> out;
  for (int i = 0; i < kThrusterCount; ++i)
    if ((bits_ >> i) & 1U) out.push_back(thruster_at(i));
  return out;
}

std::string join(ThrusterSet set, std::string_view sep) {
  std::string out;
  for (ThrusterName n : set.members()) {
    if (!out.empty()) out += sep;
    out += to_string(n);
  }
  return out;
}

std::vector<std::string> geometry_problems(const ThrusterGeometry& geometry) {
  std::vector<std::string> problems;
  for (int i = 0; i < kThrusterCount; ++i) {
    const ThrusterSpec& t = geometry.thrusters[i];
    if (!is_finite(t.position) || !is_finite(t.direction) || !std::isfinite(t.thrust))
      problems.push_back(fmt::format("{}: non-finite entry", kNames[i]));
    if (std::abs(norm(t.direction) - 1.0) > 1e-9)
      problems.push_back(fmt::format("{}: direction is not a unit vector", kNames[i]));
    if (!(t.thrust > 0.0)) problems.push_back(fmt::format("{}: thrust must be positive", kNames[i]));
  }
  return problems;
}

ThrusterGeometry default_geometry() {
  // Body frame: x forward, y toward the +Y command, z toward the +Z command.
  constexpr double kThrust = 3.6;
  ThrusterGeometry g;
  auto set = [&](ThrusterName n, Vec3 position, Vec3 exhaust) {
    g[n] = ThrusterSpec{position, exhaust, kThrust};
  };
  const Vec3 aft{-1, 0, 0}, fore{1, 0, 0}, port{0, 1, 0}, starboard{0, -1, 0};
  const Vec3 below{0, 0, -1}, above{0, 0, 1};

  // Back-facing and front-facing jets share their (y, z) stations so that a
  // B/F pair with equal index cancels exactly.
  set(ThrusterName::F1, {-0.20, 0.20, -0.30}, aft);
  set(ThrusterName::F2, {-0.20, -0.20, -0.30}, aft);
  set(ThrusterName::F3, {-0.20, 0.20, 0.30}, aft);
  set(ThrusterName::F4, {-0.20, 0.00, 0.00}, aft);
  set(ThrusterName::B1, {0.10, 0.20, -0.30}, fore);
  set(ThrusterName::B2, {0.10, -0.20, -0.30}, fore);
  set(ThrusterName::B3, {0.10, 0.20, 0.30}, fore);
  set(ThrusterName::B4, {0.10, 0.00, 0.00}, fore);

  // Rear lateral and vertical jets sit in the x = 0 plane of the center of
  // mass; front jets sit 0.25 m ahead at slightly different stations.
  set(ThrusterName::L1R, {0.00, 0.25, 0.30}, port);
  set(ThrusterName::L3R, {0.00, 0.25, -0.30}, port);
  set(ThrusterName::L1F, {0.25, 0.25, 0.25}, port);
  set(ThrusterName::L3F, {0.25, 0.25, -0.25}, port);
  set(ThrusterName::R2R, {0.00, -0.25, -0.30}, starboard);
  set(ThrusterName::R4R, {0.00, -0.25, 0.30}, starboard);
  set(ThrusterName::R2F, {0.25, -0.25, -0.25}, starboard);
  set(ThrusterName::R4F, {0.25, -0.25, 0.20}, starboard);

  set(ThrusterName::U1R, {0.00, 0.20, -0.35}, below);
  set(ThrusterName::U3R, {0.00, -0.20, -0.35}, below);
  set(ThrusterName::U1F, {0.25, 0.20, -0.35}, below);
  set(ThrusterName::U3F, {0.25, -0.15, -0.35}, below);
  set(ThrusterName::D2R, {0.00, -0.20, 0.35}, above);
  set(ThrusterName::D4R, {0.00, 0.20, 0.35}, above);
  set(ThrusterName::D2F, {0.25, -0.20, 0.35}, above);
  set(ThrusterName::D4F, {0.25, 0.15, 0.35}, above);
  return g;
}

std::string_view to_string(ThrusterGroup g) { return g == ThrusterGroup::BF ? "BF" : "LRUD"; }

ThrusterGroup group_of(ThrusterName n) {
  return index_of(n) < index_of(ThrusterName::L1F) ? ThrusterGroup::BF : ThrusterGroup::LRUD;
}

std::string to_string(const CommandTriple& t) {
  return fmt::format("({}, {}, {})", to_string(t.a), to_string(t.b), to_string(t.c));
}

CommandTriple SelectionTable::triple(int row_index) {
  return {static_cast<AxisCommand>(row_index / 9 - 1),
          static_cast<AxisCommand>((row_index / 3) % 3 - 1),
          static_cast<AxisCommand>(row_index % 3 - 1)};
}

std::vector<std::string> table_problems(const SelectionTable& table) {
  std::vector<std::string> problems;
  for (int i = 0; i < SelectionTable::kRows; ++i) {
    const CommandTriple t = SelectionTable::triple(i);
    const SelectionRow& row = table.at(t);
    if (!(row.mandatory & row.optional).empty())
      problems.push_back(fmt::format("row {}: mandatory and optional overlap", to_string(t)));
  }
  return problems;
}

SelectionRow bf_thrusters(const SelectionTables& tables, AxisCommand x, AxisCommand pitch,
                          AxisCommand yaw) {
  return tables.bf.at({x, pitch, yaw});
}

SelectionRow lrud_thrusters(const SelectionTables& tables, AxisCommand y, AxisCommand z,
                            AxisCommand roll) {
  return tables.lrud.at({y, z, roll});
}

ThrusterSet selected_thrusters(const SelectionTables& tables, const SixDofCommand& hcm,
                               const RotCommand& aah, RotAxisSet active_axes,
                               RotAxisSet ignore_hcm) {
  const SixDofCommand cmd = integrated_commands(hcm, aah, active_axes, ignore_hcm);
  const auto& tran = cmd.tran;
  const auto& rot = cmd.rot;
  const SelectionRow bf =
      bf_thrusters(tables, tran[TranAxis::X], rot[RotAxis::Pitch], rot[RotAxis::Yaw]);
  const SelectionRow lrud =
      lrud_thrusters(tables, tran[TranAxis::Y], tran[TranAxis::Z], rot[RotAxis::Roll]);

  const ThrusterSet bf_fired =
      rot[RotAxis::Roll] == AxisCommand::Zero ? bf.mandatory | bf.optional : bf.mandatory;
  const ThrusterSet lrud_fired =
      rot[RotAxis::Pitch] == AxisCommand::Zero && rot[RotAxis::Yaw] == AxisCommand::Zero
          ? lrud.mandatory | lrud.optional
          : lrud.mandatory;
  return bf_fired | lrud_fired;
}

bool thruster_consistency(ThrusterSet selection, const ThrusterGeometry& geometry) {
  const auto members = selection.members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const ThrusterSpec& a = geometry[members[i]];
      const ThrusterSpec& b = geometry[members[j]];
      if (dot(a.direction, b.direction) >= -0.99) continue;
      const Vec3 ta = a.torque();
      const Vec3 tb = b.torque();
      const double na = norm(ta);
      const double nb = norm(tb);
      const double scale = std::max({na, nb, 1.0});
      const bool a_zero = na <= 1e-12 * scale;
      const bool b_zero = nb <= 1e-12 * scale;
      if (a_zero && b_zero) return false;
      if (a_zero || b_zero) continue;
      if (dot(ta, tb) / (na * nb) < -0.99) return false;
    }
  }
  return true;
}

Wrench net_force_torque(ThrusterSet selection, const ThrusterGeometry& geometry,
                        ThrusterSet failed) {
  Wrench w;
  for (ThrusterName n : selection.minus(failed).members()) {
    const ThrusterSpec& t = geometry[n];
    const Vec3 f = t.force();
    w.force += f;
    w.torque += cross(t.position, f);
  }
  return w;
}

const std::vector<AnchorRow>& anchor_rows() {
  using enum AxisCommand;
  using enum ThrusterName;
  static const std::vector<AnchorRow> rows{
      {ThrusterGroup::BF, {Neg, Zero, Zero}, {{B4}, {B2, B3}}},
      {ThrusterGroup::BF, {Zero, Zero, Zero}, {{}, {}}},
      {ThrusterGroup::BF, {Pos, Neg, Zero}, {{F1, F2}, {}}},
      {ThrusterGroup::LRUD, {Neg, Neg, Zero}, {{}, {}}},
      {ThrusterGroup::LRUD, {Neg, Zero, Zero}, {{L1R, L3R}, {L1F, L3F}}},
      {ThrusterGroup::LRUD, {Pos, Zero, Pos}, {{R2R}, {R2F, R4F}}},
  };
  return rows;
}

std::vector<AnchorDivergence> check_anchor_rows(const SelectionTables& tables) {
  std::vector<AnchorDivergence> out;
  for (const AnchorRow& anchor : anchor_rows()) {
    const SelectionRow& actual = tables[anchor.group].at(anchor.triple);
    if (!(actual == anchor.expected)) out.push_back({anchor, actual});
  }
  return out;
}

namespace {

// Calls fn(indices) for every k-subset of [0, n) in lexicographic order until
// fn returns false.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  if (k > n || k <= 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!fn(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

class RowSearch {
 public:
  RowSearch(const ThrusterGeometry& geometry, ThrusterGroup group)
      : geometry_(geometry), axes_(axes_of(group)) {
    for (int i = 0; i < kThrusterCount; ++i)
      if (group_of(thruster_at(i)) == group) members_.push_back(thruster_at(i));
  }

  Components wrench_of(ThrusterSet s) const { return components(net_force_torque(s, geometry_)); }

  double off_group_norm(const Components& c) const {
    double sum = 0.0;
    for (int k : axes_.off_group) sum += c[k] * c[k];
    return std::sqrt(sum);
  }

  bool matches(const Components& c, const std::array<int, 3>& signs) const {
    for (int slot = 0; slot < 3; ++slot) {
      const double v = c[axes_.commanded[slot]];
      if (signs[slot] == 0 ? std::abs(v) > kZeroTol : signs[slot] * v <= kZeroTol) return false;
    }
    return true;
  }

  std::optional<ThrusterSet> mandatory(const std::array<int, 3>& signs) const {
    const int n = static_cast<int>(members_.size());
    for (int k = 1; k <= n; ++k) {
      std::optional<ThrusterSet> best;
      double best_norm = 0.0;
      for_each_combination(n, k, [&](const std::vector<int>& idx) {
        const ThrusterSet s = subset(members_, idx);
        const Components c = wrench_of(s);
        if (!matches(c, signs)) return true;
        const double off = off_group_norm(c);
        if (!best || off < best_norm - kZeroTol) {
          best = s;
          best_norm = off;
        }
        return true;
      });
      if (best) return best;
    }
    return std::nullopt;
  }

  ThrusterSet optional(ThrusterSet mandatory, const std::array<int, 3>& signs) const {
    std::vector<ThrusterName> pool;
    for (ThrusterName n : members_) {
      if (mandatory.contains(n)) continue;
      for (ThrusterName m : mandatory.members())
        if (dot(geometry_[n].direction, geometry_[m].direction) > 0.99) {
          pool.push_back(n);
          break;
        }
    }
    const Components base = wrench_of(mandatory);
    const int room = kMaxFiredThrusters - mandatory.size();
    const int n = static_cast<int>(pool.size());
    for (int k = std::min(room, n); k >= 1; --k) {
      std::optional<ThrusterSet> best;
      double best_norm = 0.0;
      for_each_combination(n, k, [&](const std::vector<int>& idx) {
        const ThrusterSet extra = subset(pool, idx);
        const Components c = wrench_of(mandatory | extra);
        for (int slot = 0; slot < 3; ++slot) {
          const int axis = axes_.commanded[slot];
          if (signs[slot] == 0 ? std::abs(c[axis]) > kZeroTol
                               : signs[slot] * c[axis] <= signs[slot] * base[axis] + kZeroTol)
            return true;
        }
        const double off = off_group_norm(c);
        if (!best || off < best_norm - kZeroTol) {
          best = extra;
          best_norm = off;
        }
        return true;
      });
      if (best) return *best;
    }
    return {};
  }

 private:
  static ThrusterSet subset(const std::vector<ThrusterName>& from, const std::vector<int>& idx) {
    ThrusterSet s;
    for (int i : idx) s.insert(from[i]);
    return s;
  }

  const ThrusterGeometry& geometry_;
  GroupAxes axes_;
  std::vector<ThrusterName> members_;
};

}  // namespace

TableDerivation derive_table_from_geometry(const ThrusterGeometry& geometry, ThrusterGroup group) {
  TableDerivation out;
  const RowSearch search(geometry, group);
  for (int i = 0; i < SelectionTable::kRows; ++i) {
    const CommandTriple t = SelectionTable::triple(i);
    const std::array<int, 3> signs{sign(t.a), sign(t.b), sign(t.c)};
    if (signs == std::array<int, 3>{0, 0, 0}) continue;
    if (group == ThrusterGroup::LRUD && signs[0] != 0 && signs[1] != 0) continue;

    const auto mandatory = search.mandatory(signs);
    if (!mandatory) {
      out.unsatisfiable.push_back(t);
      continue;
    }
    out.table.at(t) = {*mandatory, search.optional(*mandatory, signs)};
  }

  for (const AnchorRow& anchor : anchor_rows()) {
    if (anchor.group != group) continue;
    const SelectionRow& actual = out.table.at(anchor.triple);
    if (!(actual == anchor.expected)) out.divergent.push_back({anchor, actual});
  }
  return out;
}

DataFormatError::DataFormatError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, what)), line_(line) {}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, const std::string& source, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw DataFormatError(source, line, fmt::format("bad number '{}'", tok));
  }
}

template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = split_ws(line);
    if (!tokens.empty()) fn(line_no, tokens);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

ThrusterSet parse_name_list(const std::vector<std::string>& tokens, std::size_t begin,
                            std::size_t end, const std::string& source, int line) {
  ThrusterSet s;
  if (end - begin == 1 && tokens[begin] == "-") return s;
  if (begin == end) throw DataFormatError(source, line, "empty thruster list (use '-')");
  for (std::size_t i = begin; i < end; ++i) {
    auto n = parse_thruster_name(tokens[i]);
    if (!n) throw DataFormatError(source, line, fmt::format("unknown thruster '{}'", tokens[i]));
    if (s.contains(*n))
      throw DataFormatError(source, line, fmt::format("thruster '{}' listed twice", tokens[i]));
    s.insert(*n);
  }
  return s;
}

}  // namespace

ThrusterData parse_thruster_data(std::string_view geometry_text, std::string_view tables_text,
                                 const std::string& source) {
  ThrusterData data;
  std::array<bool, kThrusterCount> seen_thruster{};
  for_each_record(geometry_text, [&](int line, const std::vector<std::string>& tok) {
    if (tok[0] != "thruster") return;
    if (tok.size() != 9)
      throw DataFormatError(source, line, "thruster record needs name, 3 + 3 coordinates, thrust");
    auto name = parse_thruster_name(tok[1]);
    if (!name) throw DataFormatError(source, line, fmt::format("unknown thruster '{}'", tok[1]));
    if (seen_thruster[index_of(*name)])
      throw DataFormatError(source, line, fmt::format("duplicate thruster '{}'", tok[1]));
    seen_thruster[index_of(*name)] = true;
    double v[7];
    for (int i = 0; i < 7; ++i) v[i] = parse_number(tok[2 + i], source, line);
    data.geometry[*name] = ThrusterSpec{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, v[6]};
  });
  for (int i = 0; i < kThrusterCount; ++i)
    if (!seen_thruster[i])
      throw DataFormatError(source, 0, fmt::format("missing thruster '{}'", kNames[i]));
  if (auto problems = geometry_problems(data.geometry); !problems.empty())
    throw DataFormatError(source, 0, problems.front());

  std::array<std::array<bool, SelectionTable::kRows>, 2> seen_row{};
  for_each_record(tables_text, [&](int line, const std::vector<std::string>& tok) {
    if (tok[0] != "row") return;
    // row GROUP A B C : mandatory... : optional...
    if (tok.size() < 9) throw DataFormatError(source, line, "row record too short");
    ThrusterGroup group;
    if (tok[1] == "BF") group = ThrusterGroup::BF;
    else if (tok[1] == "LRUD") group = ThrusterGroup::LRUD;
    else throw DataFormatError(source, line, fmt::format("unknown group '{}'", tok[1]));
    CommandTriple t;
    AxisCommand* slots[3] = {&t.a, &t.b, &t.c};
    for (int i = 0; i < 3; ++i) {
      auto c = parse_axis_command(tok[2 + i]);
      if (!c) throw DataFormatError(source, line, fmt::format("bad axis command '{}'", tok[2 + i]));
      *slots[i] = *c;
    }
    if (tok[5] != ":") throw DataFormatError(source, line, "expected ':' after triple");
    std::size_t second = 0;
    for (std::size_t i = 6; i < tok.size(); ++i)
      if (tok[i] == ":") {
        second = i;
        break;
      }
    if (second == 0) throw DataFormatError(source, line, "expected ':' before optional list");
    SelectionRow row{parse_name_list(tok, 6, second, source, line),
                     parse_name_list(tok, second + 1, tok.size(), source, line)};
    const int gi = group == ThrusterGroup::BF ? 0 : 1;
    const int ri = SelectionTable::index(t);
    if (seen_row[gi][ri])
      throw DataFormatError(source, line, fmt::format("duplicate row {} {}", tok[1], to_string(t)));
    seen_row[gi][ri] = true;
    data.tables[group].at(t) = row;
  });
  for (int gi = 0; gi < 2; ++gi)
    for (int ri = 0; ri < SelectionTable::kRows; ++ri)
      if (!seen_row[gi][ri])
        throw DataFormatError(source, 0,
                              fmt::format("missing row {} {}", gi == 0 ? "BF" : "LRUD",
                                          to_string(SelectionTable::triple(ri))));
  for (ThrusterGroup g : {ThrusterGroup::BF, ThrusterGroup::LRUD})
    if (auto problems = table_problems(data.tables[g]); !problems.empty())
      throw DataFormatError(source, 0, problems.front());
  return data;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ThrusterData load_thruster_data(const std::filesystem::path& geometry_path,
                                const std::filesystem::path& tables_path) {
  const std::string geometry_text = read_file(geometry_path);
  const std::string tables_text =
      tables_path == geometry_path ? geometry_text : read_file(tables_path);
  return parse_thruster_data(geometry_text, tables_text, geometry_path.string());
}

std::string format_thruster_data(const ThrusterData& data) {
  std::string out;
  out += "# Thruster geometry and selection tables.\n";
  out += "#\n";
  out += "# thruster NAME  px py pz  dx dy dz  thrust\n";
  out += "#   position in m (body frame, from the center of mass), unit exhaust\n";
  out += "#   direction (force acts opposite), thrust in N.\n";
  out += "# row GROUP A B C : MANDATORY... : OPTIONAL...\n";
  out += "#   BF rows are keyed (X, PITCH, YAW), LRUD rows (Y, Z, ROLL); '-' is empty.\n\n";
  for (int i = 0; i < kThrusterCount; ++i) {
    const ThrusterSpec& t = data.geometry.thrusters[i];
    out += fmt::format("thruster {:<4} {} {} {}  {} {} {}  {}\n", kNames[i], t.position.x,
                       t.position.y, t.position.z, t.direction.x, t.direction.y, t.direction.z,
                       t.thrust);
  }
  for (ThrusterGroup g : {ThrusterGroup::BF, ThrusterGroup::LRUD}) {
    out += "\n";
    for (int i = 0; i < SelectionTable::kRows; ++i) {
      const CommandTriple t = SelectionTable::triple(i);
      const SelectionRow& row = data.tables[g].at(t);
      auto list = [](ThrusterSet s) { return s.empty() ? std::string("-") : join(s, " "); };
      out += fmt::format("row {:<4} {:<4} {:<4} {:<4} : {} : {}\n", to_string(g), to_string(t.a),
                         to_string(t.b), to_string(t.c), list(row.mandatory), list(row.optional));
    }
  }
  return out;
}

}  // namespace safer
