#pragma once

#include <string>
#include <vector>

namespace kacsub {

/// One named identity with its measured residual.
struct Check {
  std::string name;
  double residual = 0.0;
  bool pass = true;
};

/// Axiom-by-axiom outcome of a validator.
struct Report {
  std::vector<Check> checks;

  void add(std::string name, double residual, double eps) {
    checks.push_back({std::move(name), residual, residual < eps});
  }
  void add_flag(std::string name, bool ok) { checks.push_back({std::move(name), ok ? 0.0 : 1.0, ok}); }

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  bool passed(const std::string& name) const {
    const Check* c = find(name);
    return c != nullptr && c->pass;
  }
  double worst() const {
    double w = 0.0;
    for (const auto& c : checks) w = std::max(w, c.residual);
    return w;
  }
  std::string failures() const {
    std::string out;
    for (const auto& c : checks)
      if (!c.pass) out += (out.empty() ? "" : ", ") + c.name + "=" + std::to_string(c.residual);
    return out;
  }
};

}  // namespace kacsub
