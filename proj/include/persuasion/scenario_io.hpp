#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "persuasion/core_model.hpp"
#include "persuasion/exact_oracle.hpp"

namespace persuasion {

/// Malformed or invalid scenario document. `line` is 1-based, 0 when unknown.
class ScenarioFileError : public std::runtime_error {
 public:
  ScenarioFileError(const std::string& message, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// How the announced structure of a scenario document is obtained.
struct StructureSpec {
  enum class Kind { BpOptimal, Full, None, Epsilon, Explicit };
  Kind kind = Kind::BpOptimal;
  exact::Rational epsilon;  // Kind::Epsilon only
};

StructureSpec parse_structure_kind(const std::string& text);
std::string to_string(const StructureSpec& spec);

/// A parsed scenario file. Everything numeric is kept exact; floating-point
/// views are derived from the rationals.
struct ScenarioDocument {
  std::string name;
  exact::RationalScenario exact;
  StructureSpec structure_spec;
  /// Optional signal labels for generated structures, or the explicit
  /// structure's labels.
  std::vector<std::string> signal_labels;
  std::optional<exact::RationalStructure> explicit_structure;

  Scenario scenario() const { return exact.to_double(); }
  exact::RationalStructure exact_structure() const;
  InformationStructure structure() const { return exact_structure().to_double(); }
};

ScenarioDocument parse_scenario(const std::string& text);
ScenarioDocument load_scenario(const std::filesystem::path& path);

/// Canonical JSON text; numbers are written as exact rational strings.
std::string serialize_scenario(const ScenarioDocument& document);

}  // namespace persuasion
