#include "safer/contracts.hpp"

#include <atomic>

namespace safer::contracts {

namespace {
std::atomic<bool> g_checking{true};
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Precondition: return "Precondition";
    case ViolationKind::Postcondition: return "Postcondition";
    case ViolationKind::Invariant: return "Invariant";
    case ViolationKind::Signature: return "Signature";
  }
  return "?";
}

std::string ContractViolation::describe() const {
  std::string out(to_string(kind));
  out += " violation in ";
  out += location.empty() ? std::string("<unknown>") : location;
  if (!detail.empty()) out += ": " + detail;
  return out;
}

void set_checking_enabled(bool enabled) { g_checking.store(enabled, std::memory_order_relaxed); }
bool checking_enabled() { return g_checking.load(std::memory_order_relaxed); }

bool InvariantRegistry::contains(std::string_view name) const {
  std::lock_guard lock(mutex_);
  return types_.find(name) != types_.end();
}

std::optional<ContractViolation> InvariantRegistry::check(std::string_view name,
                                                          const std::any& value) const {
  std::lock_guard lock(mutex_);
  auto it = types_.find(name);
  if (it == types_.end())
    return ContractViolation{ViolationKind::Signature, std::string(name), "unregistered type"};
  const std::type_index type(value.type());
  for (const Entry& entry : it->second) {
    if (entry.type != type) continue;
    if (entry.holds(value)) return std::nullopt;
    return ContractViolation{ViolationKind::Invariant, std::string(name),
                             entry.render ? entry.render(value) : std::string("<value>")};
  }
  return ContractViolation{ViolationKind::Signature, std::string(name),
                           std::string("value of unexpected representation ") + value.type().name()};
}

std::optional<ContractViolation> check_invariant(std::string_view type_name, const std::any& value) {
  return domain_registry().check(type_name, value);
}

}  // namespace safer::contracts
