#pragma once

#include <string>

#include "persuasion/core_model.hpp"
#include "persuasion/exact_oracle.hpp"

namespace fixtures {

using persuasion::InformationStructure;
using persuasion::Matrix;
using persuasion::Scenario;
using persuasion::exact::Rational;
using persuasion::exact::RationalScenario;
using persuasion::exact::RationalStructure;

inline Scenario seller_buyer() {
  return Scenario({"H", "L"}, {"B", "NB"}, {0.3, 0.7}, Matrix({{1, 0}, {-1, 0}}), Matrix({{1, 0}, {1, 0}}));
}

inline Scenario speed_limit() {
  return Scenario({"E", "NE"}, {"S", "NS"}, {0.3, 0.7}, Matrix({{-1, 0}, {1, 0}}), Matrix({{0, 1}, {0, 1}}));
}

inline InformationStructure seller_buyer_bp() {
  return InformationStructure({"h", "l"}, Matrix({{1, 0}, {3.0 / 7.0, 4.0 / 7.0}}));
}

inline InformationStructure speed_limit_bp() {
  return InformationStructure({"s", "ns"}, Matrix({{1, 0}, {3.0 / 7.0, 4.0 / 7.0}}));
}

inline Rational q(const char* text) { return persuasion::exact::parse_rational(text); }

inline RationalScenario exact_seller_buyer() {
  return RationalScenario({"H", "L"}, {"B", "NB"}, {q("3/10"), q("7/10")}, {{q("1"), q("0")}, {q("-1"), q("0")}},
                          {{q("1"), q("0")}, {q("1"), q("0")}});
}

inline RationalScenario exact_speed_limit() {
  return RationalScenario({"E", "NE"}, {"S", "NS"}, {q("3/10"), q("7/10")}, {{q("-1"), q("0")}, {q("1"), q("0")}},
                          {{q("0"), q("1")}, {q("0"), q("1")}});
}

inline RationalStructure exact_bp(std::string first = "h", std::string second = "l") {
  return RationalStructure({first, second}, {{q("1"), q("0")}, {q("3/7"), q("4/7")}});
}

inline std::string scenario_path(const std::string& name) {
  return std::string(PERSUASION_SCENARIO_DIR) + "/" + name;
}

}  // namespace fixtures
