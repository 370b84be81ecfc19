#include "persuasion/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "persuasion/exact_design.hpp"

namespace persuasion {

namespace {

using nlohmann::json;
using exact::Rational;
using exact::RationalMatrix;

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort location of a key for semantic errors.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ScenarioFileError("'" + key + "': " + message, line_of_key(text_, key));
  }

  const json& member(const json& object, const std::string& key) const {
    auto it = object.find(key);
    if (it == object.end()) throw ScenarioFileError("missing required key '" + key + "'", 0);
    return *it;
  }

  std::vector<std::string> labels(const json& value, const std::string& key) const {
    if (!value.is_array() || value.empty()) fail(key, "expected a non-empty array of strings");
    std::vector<std::string> out;
    for (const json& item : value) {
      if (!item.is_string()) fail(key, "expected a non-empty array of strings");
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  Rational number(const json& value, const std::string& key) const {
    try {
      if (value.is_string()) return exact::parse_rational(value.get<std::string>());
      if (value.is_number_integer()) {
        return exact::parse_rational(value.dump());
      }
      if (value.is_number_float()) {
        // Shortest round-trip text reproduces the literal as written.
        char buffer[64];
        auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value.get<double>());
        if (ec != std::errc()) fail(key, "unrepresentable number");
        return exact::parse_rational(std::string_view(buffer, static_cast<std::size_t>(end - buffer)));
      }
    } catch (const std::invalid_argument& error) {
      fail(key, error.what());
    }
    fail(key, "expected a number or a rational string such as \"3/7\"");
  }

  std::vector<Rational> vector(const json& value, const std::string& key) const {
    if (!value.is_array()) fail(key, "expected an array");
    std::vector<Rational> out;
    for (const json& item : value) out.push_back(number(item, key));
    return out;
  }

  RationalMatrix matrix(const json& value, const std::string& key) const {
    if (!value.is_array() || value.empty()) fail(key, "expected an array of rows");
    RationalMatrix out;
    for (const json& row : value) out.push_back(vector(row, key));
    return out;
  }

 private:
  const std::string& text_;
};

json rational_json(const Rational& value) { return value.get_str(); }

json matrix_json(const RationalMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const Rational& value : row) r.push_back(rational_json(value));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

ScenarioFileError::ScenarioFileError(const std::string& message, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

StructureSpec parse_structure_kind(const std::string& text) {
  StructureSpec spec;
  if (text == "bp_optimal") {
    spec.kind = StructureSpec::Kind::BpOptimal;
  } else if (text == "full") {
    spec.kind = StructureSpec::Kind::Full;
  } else if (text == "none") {
    spec.kind = StructureSpec::Kind::None;
  } else if (text == "explicit") {
    spec.kind = StructureSpec::Kind::Explicit;
  } else if (text.rfind("epsilon:", 0) == 0) {
    spec.kind = StructureSpec::Kind::Epsilon;
    spec.epsilon = exact::parse_rational(text.substr(8));
    if (spec.epsilon < 0 || spec.epsilon > 1) throw std::invalid_argument("epsilon must lie in [0, 1]");
  } else {
    throw std::invalid_argument("unknown structure_kind '" + text +
                                "' (expected bp_optimal, full, none, epsilon:<value> or explicit)");
  }
  return spec;
}

std::string to_string(const StructureSpec& spec) {
  switch (spec.kind) {
    case StructureSpec::Kind::BpOptimal: return "bp_optimal";
    case StructureSpec::Kind::Full: return "full";
    case StructureSpec::Kind::None: return "none";
    case StructureSpec::Kind::Explicit: return "explicit";
    case StructureSpec::Kind::Epsilon: return "epsilon:" + spec.epsilon.get_str();
  }
  return "unknown";
}

exact::RationalStructure ScenarioDocument::exact_structure() const {
  auto labels_or = [&](std::vector<std::string> fallback) {
    return signal_labels.size() == fallback.size() ? signal_labels : fallback;
  };
  switch (structure_spec.kind) {
    case StructureSpec::Kind::Explicit:
      if (!explicit_structure) throw std::invalid_argument("explicit structure_kind without a structure matrix");
      return *explicit_structure;
    case StructureSpec::Kind::BpOptimal:
      return exact::bp_optimal(exact, labels_or({"s1", "s2"})).structure;
    case StructureSpec::Kind::Full:
      return exact::full_disclosure(labels_or({"s1", "s2"}));
    case StructureSpec::Kind::None:
      return exact::no_disclosure(labels_or({"s0"}).front());
    case StructureSpec::Kind::Epsilon:
      return exact::epsilon_structure(exact, structure_spec.epsilon, labels_or({"s0", "s1", "s2"}));
  }
  throw std::logic_error("unhandled structure kind");
}

ScenarioDocument parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& error) {
    throw ScenarioFileError(std::string("invalid JSON: ") + error.what(),
                            line_of_offset(text, error.byte == 0 ? 0 : error.byte - 1));
  }
  if (!root.is_object()) throw ScenarioFileError("scenario document must be a JSON object", 1);

  const Reader reader(text);
  auto states = reader.labels(reader.member(root, "states"), "states");
  auto actions = reader.labels(reader.member(root, "actions"), "actions");
  auto prior = reader.vector(reader.member(root, "prior"), "prior");
  auto receiver = reader.matrix(reader.member(root, "receiver_utility"), "receiver_utility");
  auto sender = reader.matrix(reader.member(root, "sender_utility"), "sender_utility");
  if (states.size() != 2) reader.fail("states", "exactly two states are supported");
  if (prior.size() != states.size()) reader.fail("prior", "one entry per state required");
  for (const auto* key : {"receiver_utility", "sender_utility"}) {
    const RationalMatrix& table = std::string_view(key) == "sender_utility" ? sender : receiver;
    if (table.size() != states.size()) reader.fail(key, "one row per state required");
    for (const auto& row : table) {
      if (row.size() != actions.size()) reader.fail(key, "one column per action required");
    }
  }
  std::optional<exact::RationalScenario> scenario;
  try {
    scenario.emplace(std::move(states), std::move(actions), std::move(prior), std::move(receiver), std::move(sender));
  } catch (const std::invalid_argument& error) {
    const std::string message = error.what();
    const char* key = message.find("prior") != std::string::npos ? "prior"
                      : message.find("revealing") != std::string::npos ? "receiver_utility"
                                                                        : "states";
    throw ScenarioFileError(message, line_of_key(text, key));
  }

  ScenarioDocument document{root.value("name", std::string()), std::move(*scenario), {}, {}, {}};
  std::optional<std::string> kind_text;
  if (auto it = root.find("structure_kind"); it != root.end()) {
    if (!it->is_string()) reader.fail("structure_kind", "expected a string");
    kind_text = it->get<std::string>();
  }
  if (auto it = root.find("structure"); it != root.end()) {
    if (!it->is_object()) reader.fail("structure", "expected an object with 'signals' and 'matrix'");
    if (auto signals = it->find("signals"); signals != it->end()) {
      document.signal_labels = reader.labels(*signals, "signals");
    }
    if (auto matrix = it->find("matrix"); matrix != it->end()) {
      if (document.signal_labels.empty()) reader.fail("structure", "a matrix needs 'signals' labels");
      try {
        document.explicit_structure.emplace(document.signal_labels, reader.matrix(*matrix, "matrix"));
      } catch (const std::invalid_argument& error) {
        reader.fail("matrix", error.what());
      }
      if (document.explicit_structure->matrix().size() != 2) reader.fail("matrix", "one row per state required");
      if (!kind_text) kind_text = "explicit";
    }
  }
  try {
    document.structure_spec = parse_structure_kind(kind_text.value_or("bp_optimal"));
  } catch (const std::invalid_argument& error) {
    reader.fail("structure_kind", error.what());
  }
  if (document.structure_spec.kind == StructureSpec::Kind::Explicit && !document.explicit_structure) {
    reader.fail("structure_kind", "'explicit' requires structure.matrix");
  }
  return document;
}

ScenarioDocument load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioDocument& document) {
  const exact::RationalScenario& s = document.exact;
  json root = json::object();
  if (!document.name.empty()) root["name"] = document.name;
  root["states"] = s.states();
  root["actions"] = s.actions();
  json prior = json::array();
  for (const Rational& p : s.prior()) prior.push_back(rational_json(p));
  root["prior"] = prior;
  root["receiver_utility"] = matrix_json(s.receiver_utility());
  root["sender_utility"] = matrix_json(s.sender_utility());
  if (!document.signal_labels.empty() || document.explicit_structure) {
    json structure = json::object();
    if (document.explicit_structure) {
      structure["signals"] = document.explicit_structure->signals();
      structure["matrix"] = matrix_json(document.explicit_structure->matrix());
    } else {
      structure["signals"] = document.signal_labels;
    }
    root["structure"] = structure;
  }
  root["structure_kind"] = to_string(document.structure_spec);
  return root.dump(2) + "\n";
}

}  // namespace persuasion
