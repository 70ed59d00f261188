#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safer/commands.hpp"
#include "safer/linalg.hpp"

namespace safer {

// B* fire forward (push back), F* fire backward (push forward); L/R/U/D push
// left/right/up/down with a front (F) or rear (R) suffix.
enum class ThrusterName : std::uint8_t {
  B1, B2, B3, B4,
  F1, F2, F3, F4,
  L1F, L1R, L3F, L3R,
  R2F, R2R, R4F, R4R,
  U1F, U1R, U3F, U3R,
  D2F, D2R, D4F, D4R,
};

inline constexpr int kThrusterCount = 24;
inline constexpr int kMaxFiredThrusters = 4;

std::string_view to_string(ThrusterName name);
std::optional<ThrusterName> parse_thruster_name(std::string_view text);
constexpr int index_of(ThrusterName name) { return static_cast<int>(name); }
constexpr ThrusterName thruster_at(int index) { return static_cast<ThrusterName>(index); }

class ThrusterSet {
 public:
  constexpr ThrusterSet() = default;
  constexpr ThrusterSet(std::initializer_list<ThrusterName> names) {
    for (ThrusterName n : names) insert(n);
  }
  static constexpr ThrusterSet from_bits(std::uint32_t bits) {
    ThrusterSet s;
    s.bits_ = bits & kAllBits;
    return s;
  }

  constexpr bool contains(ThrusterName n) const { return (bits_ >> index_of(n)) & 1U; }
  constexpr void insert(ThrusterName n) { bits_ |= 1U << index_of(n); }
  constexpr void erase(ThrusterName n) { bits_ &= ~(1U << index_of(n)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint32_t bits() const { return bits_; }
  int size() const;

  // Members in canonical enum order.
  std::vector<ThrusterName> members() const;

  constexpr ThrusterSet operator|(ThrusterSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr ThrusterSet operator&(ThrusterSet o) const { return from_bits(bits_ & o.bits_); }
  constexpr ThrusterSet minus(ThrusterSet o) const { return from_bits(bits_ & ~o.bits_); }

  friend constexpr bool operator==(ThrusterSet, ThrusterSet) = default;
  friend constexpr auto operator<=>(ThrusterSet, ThrusterSet) = default;

 private:
  static constexpr std::uint32_t kAllBits = (1U << kThrusterCount) - 1U;
  std::uint32_t bits_ = 0;
};

// Space-free rendering joined by `sep`, e.g. "B2;B3;B4".
std::string join(ThrusterSet set, std::string_view sep = ";");

struct ThrusterSpec {
  Vec3 position;   // m, body frame, relative to the center of mass
  Vec3 direction;  // unit exhaust direction; the force on the body is opposite
  double thrust = 0.0;  // N

  Vec3 force() const { return -direction * thrust; }
  Vec3 torque() const { return cross(position, force()); }
};

struct ThrusterGeometry {
  std::array<ThrusterSpec, kThrusterCount> thrusters{};
  const ThrusterSpec& operator[](ThrusterName n) const { return thrusters[index_of(n)]; }
  ThrusterSpec& operator[](ThrusterName n) { return thrusters[index_of(n)]; }
};

// Empty when |direction| = 1 and thrust > 0 for every entry.
std::vector<std::string> geometry_problems(const ThrusterGeometry& geometry);

// Placeholder configuration values, not measured hardware data.
ThrusterGeometry default_geometry();

enum class ThrusterGroup : std::uint8_t { BF, LRUD };
std::string_view to_string(ThrusterGroup g);
ThrusterGroup group_of(ThrusterName n);

struct CommandTriple {
  AxisCommand a = AxisCommand::Zero;
  AxisCommand b = AxisCommand::Zero;
  AxisCommand c = AxisCommand::Zero;
  friend constexpr bool operator==(const CommandTriple&, const CommandTriple&) = default;
};

std::string to_string(const CommandTriple& t);

struct SelectionRow {
  ThrusterSet mandatory;
  ThrusterSet optional;
  friend constexpr bool operator==(const SelectionRow&, const SelectionRow&) = default;
};

// Lookup over all 27 command triples. BF rows are keyed (X, pitch, yaw);
// LRUD rows (Y, Z, roll).
class SelectionTable {
 public:
  static constexpr int kRows = 27;

  const SelectionRow& at(CommandTriple t) const { return rows_[index(t)]; }
  SelectionRow& at(CommandTriple t) { return rows_[index(t)]; }
  static CommandTriple triple(int row_index);
  static int index(CommandTriple t) {
    return (sign(t.a) + 1) * 9 + (sign(t.b) + 1) * 3 + (sign(t.c) + 1);
  }

  friend bool operator==(const SelectionTable&, const SelectionTable&) = default;

 private:
  std::array<SelectionRow, kRows> rows_{};
};

struct SelectionTables {
  SelectionTable bf;
  SelectionTable lrud;
  const SelectionTable& operator[](ThrusterGroup g) const { return g == ThrusterGroup::BF ? bf : lrud; }
  SelectionTable& operator[](ThrusterGroup g) { return g == ThrusterGroup::BF ? bf : lrud; }
  friend bool operator==(const SelectionTables&, const SelectionTables&) = default;
};

// Empty when every row has disjoint mandatory and optional sets.
std::vector<std::string> table_problems(const SelectionTable& table);

SelectionRow bf_thrusters(const SelectionTables& tables, AxisCommand x, AxisCommand pitch,
                          AxisCommand yaw);
SelectionRow lrud_thrusters(const SelectionTables& tables, AxisCommand y, AxisCommand z,
                            AxisCommand roll);

// Integrates the commands, looks up both tables and unions mandatory thrusters
// with the optional ones that no conflicting rotation rules out.
ThrusterSet selected_thrusters(const SelectionTables& tables, const SixDofCommand& hcm,
                               const RotCommand& aah, RotAxisSet active_axes,
                               RotAxisSet ignore_hcm);

// False when two selected jets directly oppose each other: force directions
// anti-parallel (dot < -0.99) and torque contributions anti-parallel or both
// vanishing, so the pair cancels out.
bool thruster_consistency(ThrusterSet selection, const ThrusterGeometry& geometry);

struct Wrench {
  Vec3 force;   // N, body frame
  Vec3 torque;  // N m, body frame
  friend bool operator==(const Wrench&, const Wrench&) = default;
};

// Sum over selection minus failed; valves are either open or closed.
Wrench net_force_torque(ThrusterSet selection, const ThrusterGeometry& geometry,
                        ThrusterSet failed = {});

// A row of the original selection logic that any table must reproduce.
struct AnchorRow {
  ThrusterGroup group;
  CommandTriple triple;
  SelectionRow expected;
};

const std::vector<AnchorRow>& anchor_rows();

struct AnchorDivergence {
  AnchorRow anchor;
  SelectionRow actual;
};

std::vector<AnchorDivergence> check_anchor_rows(const SelectionTables& tables);

struct TableDerivation {
  SelectionTable table;
  std::vector<CommandTriple> unsatisfiable;
  std::vector<AnchorDivergence> divergent;
  bool ok() const { return unsatisfiable.empty() && divergent.empty(); }
};

// Regenerates a group's table from geometry by exhaustive search:
//  - mandatory: a smallest set of group thrusters whose group-axis wrench has
//    the commanded sign on commanded axes and vanishes on the rest; ties go to
//    the smallest off-group wrench, then canonical order;
//  - optional: a largest set of further thrusters sharing a force direction
//    with the mandatory ones that strictly grows every commanded component,
//    keeps the rest at zero and keeps the row within kMaxFiredThrusters.
// LRUD rows commanding both Y and Z translation are left empty, since at most
// one translation axis is ever commanded.
TableDerivation derive_table_from_geometry(const ThrusterGeometry& geometry, ThrusterGroup group);

struct ThrusterData {
  ThrusterGeometry geometry;
  SelectionTables tables;
};

class DataFormatError : public std::runtime_error {
 public:
  DataFormatError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Reads `thruster` records from geometry_text and `row` records from
// tables_text (the two may be the same document). Every thruster and all
// 2 x 27 rows must be present exactly once.
ThrusterData parse_thruster_data(std::string_view geometry_text, std::string_view tables_text,
                                 const std::string& source = "<memory>");
ThrusterData load_thruster_data(const std::filesystem::path& geometry_path,
                                const std::filesystem::path& tables_path);
std::string format_thruster_data(const ThrusterData& data);

}  // namespace safer
