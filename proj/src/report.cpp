#include "mv2h/report.h"

#include <array>
#include <string_view>
#include <utility>

namespace mv2h {

namespace {

struct Field {
  std::string_view label;
  std::string_view key;
  const Rational EvaluationReport::*value;
};

constexpr std::array<Field, 6> kFields = {{
    {"Multi-pitch", "multi_pitch", &EvaluationReport::multi_pitch},
    {"Voice", "voice", &EvaluationReport::voice},
    {"Meter", "meter", &EvaluationReport::meter},
    {"Value", "value", &EvaluationReport::value},
    {"Harmony", "harmony", &EvaluationReport::harmony},
    {"MV2H", "mv2h", &EvaluationReport::mv2h},
}};

constexpr int kDecimalPlaces = 4;

}  // namespace

nlohmann::ordered_json reportToJson(const EvaluationReport& report, bool exact) {
  nlohmann::ordered_json json = nlohmann::ordered_json::object();
  for (const Field& field : kFields) {
    const Rational& value = report.*field.value;
    if (exact) {
      json[std::string(field.key)] = formatExact(value);
    } else {
      json[std::string(field.key)] = std::stod(formatDecimal(value, kDecimalPlaces));
    }
  }
  return json;
}

std::string emitReport(const EvaluationReport& report, OutputFormat format, bool exact) {
  if (format == OutputFormat::kJson) return reportToJson(report, exact).dump(2) + "\n";

  std::string out;
  for (const Field& field : kFields) {
    const Rational& value = report.*field.value;
    out += field.label;
    out += ": ";
    out += exact ? formatExact(value) : formatDecimal(value, kDecimalPlaces);
    out += '\n';
  }
  return out;
}

}  // namespace mv2h
