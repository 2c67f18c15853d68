// Parsers from external score formats into the canonical Score.
//
// Interchange text format, one whitespace-separated record per line. Blank
// lines and lines starting with '#' are ignored. Times are integers, or exact
// rationals written "p/q".
//
//   Note <pitch> <onset> <onset> <offset> <voice>   second onset is reserved
//   Key <time> <tonic 0-11> <Maj|Min>
//   Meter <time> <numerator> <denominator>
//   Chord <time> <label>
//   Voice <count>                                  optional
//   Bar <time>                                     explicit bar boundary
//   Grouping <bar|beat|sub_beat> <start> <end>     explicit metrical grouping

#ifndef MV2H_INGEST_H
#define MV2H_INGEST_H

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mv2h/score.h"

namespace mv2h {

enum class Severity { kWarning, kError };

struct ParseDiagnostic {
  Severity severity = Severity::kWarning;
  std::string file;
  /// "line 12" for text input, an element path such as "part[P1]/measure[3]/note[2]" for XML.
  std::string location;
  std::string message;

  std::string toString() const;
};

/// A score is present exactly when no diagnostic is an error.
struct ParseResult {
  std::optional<Score> score;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return score.has_value(); }
};

ParseResult parseInterchangeText(std::istream& input, std::string_view file_name = "<text>");
ParseResult parseInterchangeText(std::string_view text, std::string_view file_name = "<text>");

/// Inverse of parseInterchangeText: reparsing the output yields an equal Score.
void writeInterchangeText(const Score& score, std::ostream& out);
std::string toInterchangeText(const Score& score);

/// @brief Parse an uncompressed partwise MusicXML document.
///
/// One quarter note is 1000 Time units. Tied notes are merged; grace notes,
/// cue notes and unpitched notes are skipped with a warning, as are repeat
/// and jump markings, which are not expanded.
ParseResult parseMusicXml(std::istream& input, std::string_view file_name = "<musicxml>");
ParseResult parseMusicXml(std::string_view document, std::string_view file_name = "<musicxml>");

/// Dispatch on extension: .musicxml and .xml are MusicXML, anything else interchange text.
ParseResult parseScoreFile(const std::string& path);

}  // namespace mv2h

#endif  // MV2H_INGEST_H
