#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "obscura/threat_model.hpp"

namespace obscura {

// Calibrated entries carry worked per-class filter fractions for the
// reference web-application stack; Generic entries are named placeholders
// with zeroed fractions that require explicit parameterization before they
// add any filtering value.
enum class Provenance { Calibrated, Generic };

constexpr std::string_view to_string(Provenance p) {
  return p == Provenance::Calibrated ? "calibrated" : "generic";
}

struct CatalogEntry {
  ObscurityMeasure measure;
  Provenance provenance = Provenance::Generic;
  std::string description;
};

class UnknownMeasureError : public std::runtime_error {
 public:
  UnknownMeasureError(std::string name, std::string available)
      : std::runtime_error("UnknownMeasureName: no catalog measure named '" +
                           name + "' (available: " + available + ")"),
        name_(std::move(name)) {}

  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// All built-in measures. Calibrated entries ship lambda = 1 for every class;
// users override work factors per measure when composing a stack.
inline const std::vector<CatalogEntry>& builtin_measures() {
  static const std::vector<CatalogEntry> entries = [] {
    auto calibrated = [](std::string name, double w, double b, double s,
                         double h, std::string description) {
      CatalogEntry e;
      e.measure.name = std::move(name);
      e.measure.filter_fractions = {w, b, s, h};
      e.provenance = Provenance::Calibrated;
      e.description = std::move(description);
      return e;
    };
    auto generic = [](std::string name, std::string description) {
      CatalogEntry e;
      e.measure.name = std::move(name);
      e.provenance = Provenance::Generic;
      e.description = std::move(description);
      return e;
    };
    return std::vector<CatalogEntry>{
        calibrated("banner-obfuscation", .2, .2, .2, .01,
                   "Meaningless custom service banner; deters banner-checking "
                   "attacks outright"),
        calibrated("nonstandard-port-18888", .1, .1, .1, .01,
                   "Service listens on port 18888 instead of its default"),
        calibrated("server-choice-thttpd", .15, .15, .1, .02,
                   "Lightweight thttpd build instead of a mainstream server"),
        calibrated("os-choice-nextstep", .1, .1, .1, .2,
                   "Obscure hardened NextStep host with no other exposed "
                   "services"),
        calibrated("proprietary-protocol-msp", .2, .2, .2, .2,
                   "Private SSL-like transport protocol (MSP)"),
        calibrated("local-db-bdb", .05, .05, .1, .1,
                   "Local Berkeley DB storage instead of a networked database"),
        generic("obscure-software",
                "Choose obscure software; supply site-specific fractions"),
        generic("lie-about-versions",
                "Misreport version information; supply site-specific fractions"),
        generic("obscure-configuration",
                "Obscure software configuration; supply site-specific fractions"),
        generic("obscure-location",
                "Obscure software locations and paths; supply site-specific "
                "fractions"),
        generic("change-defaults",
                "Change default accounts and settings; supply site-specific "
                "fractions"),
        generic("change-passwords",
                "Rotate and strengthen passwords; supply site-specific "
                "fractions"),
        generic("randomize-attributes",
                "Randomize observable attributes per deployment; supply "
                "site-specific fractions"),
    };
  }();
  return entries;
}

inline const CatalogEntry* find_measure(std::string_view name) {
  for (const auto& entry : builtin_measures()) {
    if (entry.measure.name == name) return &entry;
  }
  return nullptr;
}

// Exact-name lookup; throws UnknownMeasureError listing the available names.
inline const CatalogEntry& lookup(std::string_view name) {
  if (const CatalogEntry* entry = find_measure(name)) return *entry;
  std::string available;
  for (const auto& entry : builtin_measures()) {
    if (!available.empty()) available += ", ";
    available += entry.measure.name;
  }
  throw UnknownMeasureError(std::string(name), available);
}

}  // namespace obscura
