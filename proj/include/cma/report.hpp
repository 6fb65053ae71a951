#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace cma {

/// One named check inside a certificate: a relative residual against its
/// tolerance, or a categorical verdict against the expected one.
struct CheckRecord {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  std::string verdict;   // empty for numeric checks
  std::string expected;  // empty for numeric checks
  bool pass = true;
};

struct CertificateReport {
  std::string subject;
  std::vector<CheckRecord> checks;
  bool passed = true;

  void add(const std::string& name, double residual, double tol) {
    CheckRecord r;
    r.name = name;
    r.residual = residual;
    r.tol = tol;
    r.pass = residual <= tol;
    passed = passed && r.pass;
    checks.push_back(std::move(r));
  }

  void add_verdict(const std::string& name, const std::string& verdict,
                   const std::string& expected) {
    CheckRecord r;
    r.name = name;
    r.verdict = verdict;
    r.expected = expected;
    r.pass = verdict == expected;
    passed = passed && r.pass;
    checks.push_back(std::move(r));
  }

  /// Informational line (e.g. a skipped precondition); never affects passed.
  void add_note(const std::string& name, const std::string& text) {
    CheckRecord r;
    r.name = name;
    r.verdict = text;
    r.pass = true;
    checks.push_back(std::move(r));
  }

  void add_condition(const std::string& name, bool ok) {
    CheckRecord r;
    r.name = name;
    r.verdict = ok ? "true" : "false";
    r.expected = "true";
    r.pass = ok;
    passed = passed && r.pass;
    checks.push_back(std::move(r));
  }

  double residual(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c.residual;
    return -1.0;
  }

  const CheckRecord* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  double max_residual() const {
    double m = 0.0;
    for (const auto& c : checks) m = std::max(m, c.residual);
    return m;
  }
};

} // namespace cma
