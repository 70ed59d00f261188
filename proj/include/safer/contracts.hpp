#pragma once

// Runtime design-by-contract kernel: invariant-carrying types, guarded
// operations with pre/post-conditions, and comprehensions over finite domains.
// Violations are values, never aborts, so callers can tally them.

#include <any>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <typeindex>
#include <utility>
#include <variant>
#include <vector>

namespace safer::contracts {

enum class ViolationKind { Precondition, Postcondition, Invariant, Signature };

std::string_view to_string(ViolationKind kind);

struct ContractViolation {
  ViolationKind kind = ViolationKind::Signature;
  std::string location;
  std::string detail;

  std::string describe() const;
  friend bool operator==(const ContractViolation&, const ContractViolation&) = default;
};

class BadCheckedAccess : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Either a value or the violation that prevented it.
template <typename T>
class Checked {
 public:
  Checked(T value) : state_(std::move(value)) {}
  Checked(ContractViolation violation) : state_(std::move(violation)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw BadCheckedAccess("no value: " + violation().describe());
    return std::get<T>(state_);
  }
  T&& value() && {
    if (!ok()) throw BadCheckedAccess("no value: " + violation().describe());
    return std::get<T>(std::move(state_));
  }
  const ContractViolation& violation() const {
    if (ok()) throw BadCheckedAccess("no violation present");
    return std::get<ContractViolation>(state_);
  }

 private:
  std::variant<T, ContractViolation> state_;
};

// Global switch for all checks (on by default). Set it before concurrent use.
void set_checking_enabled(bool enabled);
bool checking_enabled();

// RAII toggle, mostly for timing runs.
class ScopedChecking {
 public:
  explicit ScopedChecking(bool enabled) : previous_(checking_enabled()) {
    set_checking_enabled(enabled);
  }
  ~ScopedChecking() { set_checking_enabled(previous_); }
  ScopedChecking(const ScopedChecking&) = delete;
  ScopedChecking& operator=(const ScopedChecking&) = delete;

 private:
  bool previous_;
};

// Named types and their data invariants. A name may accept several C++
// representations (e.g. a strong type and the raw map it is built from);
// a value of any other representation is a signature violation.
class InvariantRegistry {
 public:
  template <typename T>
  void define(const std::string& name, std::function<bool(const T&)> predicate,
              std::function<std::string(const T&)> render = {}) {
    Entry entry;
    entry.type = std::type_index(typeid(T));
    entry.holds = [predicate](const std::any& v) { return predicate(std::any_cast<const T&>(v)); };
    if (render)
      entry.render = [render](const std::any& v) { return render(std::any_cast<const T&>(v)); };
    std::lock_guard lock(mutex_);
    types_[name].push_back(std::move(entry));
  }

  bool contains(std::string_view name) const;

  // nullopt when the value satisfies the invariant of `name`.
  std::optional<ContractViolation> check(std::string_view name, const std::any& value) const;

 private:
  struct Entry {
    std::type_index type = std::type_index(typeid(void));
    std::function<bool(const std::any&)> holds;
    std::function<std::string(const std::any&)> render;
  };
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<Entry>, std::less<>> types_;
};

// The process-wide registry, with every domain type of the simulator defined.
const InvariantRegistry& domain_registry();

// check_invariant against the domain registry.
std::optional<ContractViolation> check_invariant(std::string_view type_name, const std::any& value);

template <typename In, typename Out>
struct GuardedOperation {
  std::string name;
  std::function<Out(const In&)> body;
  std::function<bool(const In&)> precondition;              // empty means True
  std::function<bool(const In&, const Out&)> postcondition;  // empty means True
  std::vector<std::string> input_invariants;
  std::vector<std::string> result_invariants;
  std::function<std::string(const In&)> render_input;
  std::function<std::string(const Out&)> render_result;
  const InvariantRegistry* registry = nullptr;  // null means domain_registry()
};

// Runs op on input. Body exceptions propagate untouched. There is no rollback:
// side effects of the body persist when the postcondition then fails.
template <typename In, typename Out>
Checked<Out> evaluate_guarded(const GuardedOperation<In, Out>& op, const In& input) {
  if (!checking_enabled()) return op.body(input);

  const InvariantRegistry& registry = op.registry ? *op.registry : domain_registry();
  auto render_in = [&] { return op.render_input ? op.render_input(input) : std::string("<input>"); };

  for (const auto& type_name : op.input_invariants) {
    if (auto v = registry.check(type_name, std::any(input))) {
      v->location = op.name + ": " + v->location;
      return *v;
    }
  }
  if (op.precondition && !op.precondition(input))
    return ContractViolation{ViolationKind::Precondition, op.name, render_in()};

  Out result = op.body(input);

  for (const auto& type_name : op.result_invariants) {
    if (auto v = registry.check(type_name, std::any(result))) {
      v->location = op.name + ": " + v->location;
      return *v;
    }
  }
  if (op.postcondition && !op.postcondition(input, result)) {
    std::string detail = render_in() + " -> " +
                         (op.render_result ? op.render_result(result) : std::string("<result>"));
    return ContractViolation{ViolationKind::Postcondition, op.name, std::move(detail)};
  }
  return result;
}

// A comprehension domain. Unbounded domains exist so that they can be named
// and rejected; they are never enumerated.
template <typename T>
class Domain {
 public:
  Domain(std::initializer_list<T> values) : values_(values) {}
  explicit Domain(std::vector<T> values) : values_(std::move(values)) {}

  static Domain unbounded(std::string name) {
    Domain d{std::vector<T>{}};
    d.finite_ = false;
    d.name_ = std::move(name);
    return d;
  }

  bool finite() const { return finite_; }
  const std::vector<T>& values() const { return values_; }
  const std::string& name() const { return name_; }

 private:
  std::vector<T> values_;
  bool finite_ = true;
  std::string name_;
};

enum class Target { Set, Sequence, Map };

namespace detail {

template <std::size_t I, typename Tuple, typename Fn, typename... Current>
bool for_each_tuple(const Tuple& domains, Fn& fn, const Current&... current) {
  if constexpr (I == std::tuple_size_v<Tuple>) {
    return fn(current...);
  } else {
    for (const auto& v : std::get<I>(domains).values())
      if (!for_each_tuple<I + 1>(domains, fn, current..., v)) return false;
    return true;
  }
}

template <Target target, typename Element>
struct CollectionFor;
template <typename Element>
struct CollectionFor<Target::Sequence, Element> {
  using type = std::vector<Element>;
};
template <typename Element>
struct CollectionFor<Target::Set, Element> {
  using type = std::set<Element>;
};
template <typename K, typename V>
struct CollectionFor<Target::Map, std::pair<K, V>> {
  using type = std::map<K, V>;
};

}  // namespace detail

// Builds the collection of builder(t) over every tuple t of the Cartesian
// product of the domains for which filter(t) holds. Sequence order is
// lexicographic with the first domain outermost.
template <Target target, typename Filter, typename Builder, typename... Ts>
auto comprehend(Filter filter, Builder builder, const Domain<Ts>&... domains) {
  using Element = std::invoke_result_t<Builder, const Ts&...>;
  using Collection = typename detail::CollectionFor<target, Element>::type;

  std::optional<ContractViolation> violation;
  (
      [&] {
        if (!violation && !domains.finite())
          violation = ContractViolation{ViolationKind::Signature, "comprehend",
                                        "unbounded domain '" + domains.name() + "'"};
      }(),
      ...);
  if (violation) return Checked<Collection>(*violation);

  Collection out;
  auto visit = [&](const Ts&... args) -> bool {
    if (!filter(args...)) return true;
    if constexpr (target == Target::Sequence) {
      out.push_back(builder(args...));
    } else if constexpr (target == Target::Set) {
      out.insert(builder(args...));
    } else {
      auto [key, value] = builder(args...);
      auto [it, inserted] = out.emplace(key, value);
      if (!inserted && !(it->second == value)) {
        violation = ContractViolation{ViolationKind::Invariant, "comprehend",
                                      "map key bound to two distinct values"};
        return false;
      }
    }
    return true;
  };
  auto tuple = std::forward_as_tuple(domains...);
  detail::for_each_tuple<0>(tuple, visit);
  if (violation) return Checked<Collection>(*violation);
  return Checked<Collection>(std::move(out));
}

}  // namespace safer::contracts
