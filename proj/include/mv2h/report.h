// Text and JSON serialization of evaluation reports.

#ifndef MV2H_REPORT_H
#define MV2H_REPORT_H

#include <string>

#include <json.hpp>

#include "mv2h/metrics.h"

namespace mv2h {

enum class OutputFormat { kText, kJson };

/// Text: six "Name: 0.0000" lines. JSON: a flat object with keys
/// multi_pitch, voice, meter, value, harmony and mv2h.
/// Values are rounded half away from zero to 4 places, or written as "p/q"
/// strings when `exact` is set.
std::string emitReport(const EvaluationReport& report, OutputFormat format, bool exact = false);

/// The six components as a JSON object, ordered as in the text report.
nlohmann::ordered_json reportToJson(const EvaluationReport& report, bool exact = false);

}  // namespace mv2h

#endif  // MV2H_REPORT_H
