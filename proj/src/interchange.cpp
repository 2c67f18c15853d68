#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ingest_internal.h"
#include "mv2h/ingest.h"

namespace mv2h {

std::string ParseDiagnostic::toString() const {
  std::string out = file;
  if (!location.empty()) out += (out.empty() ? "" : ": ") + location;
  out += severity == Severity::kError ? ": error: " : ": warning: ";
  out += message;
  return out;
}

namespace {

class LineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int parseInt(std::string_view token, const char* field) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw LineError(std::string("bad ") + field + " '" + std::string(token) + "'");
  }
  return value;
}

Time parseTime(std::string_view token, const char* field) {
  try {
    return parseRational(token);
  } catch (const std::invalid_argument&) {
    throw LineError(std::string("bad ") + field + " '" + std::string(token) + "'");
  }
}

void expectFields(const std::vector<std::string>& fields, std::size_t count, const char* usage) {
  if (fields.size() != count) throw LineError(std::string("expected '") + usage + "'");
}

Mode parseMode(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "maj" || lower == "major") return Mode::kMajor;
  if (lower == "min" || lower == "minor") return Mode::kMinor;
  throw LineError("bad mode '" + std::string(token) + "', expected Maj or Min");
}

}  // namespace

ParseResult parseInterchangeText(std::istream& input, std::string_view file_name) {
  ParseResult result;
  auto& diagnostics = result.diagnostics;
  ScoreContent content;
  std::optional<int> declared_voices;
  bool failed = false;

  std::string line;
  int line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    std::istringstream tokens(line);
    std::vector<std::string> fields;
    for (std::string field; tokens >> field;) fields.push_back(field);
    if (fields.empty() || fields.front().front() == '#') continue;

    const std::string location = "line " + std::to_string(line_number);
    const std::string& kind = fields.front();
    try {
      if (kind == "Note") {
        expectFields(fields, 6, "Note <pitch> <onset> <onset> <offset> <voice>");
        int pitch = parseInt(fields[1], "pitch");
        Time onset = parseTime(fields[2], "onset");
        parseTime(fields[3], "onset");
        Time offset = parseTime(fields[4], "offset");
        int voice = parseInt(fields[5], "voice");
        if (pitch < 0 || pitch > 127) throw LineError("pitch outside 0-127");
        if (voice < 0) throw LineError("negative voice");
        if (offset < onset) throw LineError("offset before onset");
        if (offset == onset) {
          diagnostics.push_back({Severity::kWarning, std::string(file_name), location,
                                 "zero-duration note dropped"});
          continue;
        }
        content.notes.push_back(Note{Pitch{pitch}, onset, offset, voice});
      } else if (kind == "Key") {
        expectFields(fields, 4, "Key <time> <tonic> <Maj|Min>");
        Time time = parseTime(fields[1], "time");
        int tonic = parseInt(fields[2], "tonic");
        if (tonic < 0 || tonic > 11) throw LineError("tonic outside 0-11");
        content.keys.push_back(KeySignature{tonic, parseMode(fields[3]), time});
      } else if (kind == "Meter") {
        expectFields(fields, 4, "Meter <time> <numerator> <denominator>");
        Time time = parseTime(fields[1], "time");
        int numerator = parseInt(fields[2], "numerator");
        int denominator = parseInt(fields[3], "denominator");
        if (numerator < 1) throw LineError("numerator below 1");
        if (denominator < 1 || denominator > 32 || (denominator & (denominator - 1)) != 0) {
          throw LineError("denominator must be 1, 2, 4, 8, 16 or 32");
        }
        content.meters.push_back(TimeSignature{numerator, denominator, time});
      } else if (kind == "Chord") {
        expectFields(fields, 3, "Chord <time> <label>");
        Time time = parseTime(fields[1], "time");
        auto label = parseChordLabel(fields[2]);
        if (!label) throw LineError("bad chord label '" + fields[2] + "'");
        content.chord_symbols.push_back(ChordSymbol{*label, time});
      } else if (kind == "Voice") {
        expectFields(fields, 2, "Voice <count>");
        if (declared_voices) throw LineError("voice count declared twice");
        int count = parseInt(fields[1], "voice count");
        if (count < 0) throw LineError("negative voice count");
        declared_voices = count;
      } else if (kind == "Bar") {
        expectFields(fields, 2, "Bar <time>");
        content.bar_lines.push_back(parseTime(fields[1], "time"));
      } else if (kind == "Grouping") {
        expectFields(fields, 4, "Grouping <bar|beat|sub_beat> <start> <end>");
        auto level = parseGroupingLevel(fields[1]);
        if (!level) throw LineError("bad grouping level '" + fields[1] + "'");
        Time start = parseTime(fields[2], "start");
        Time end = parseTime(fields[3], "end");
        if (end <= start) throw LineError("grouping ends before it starts");
        content.groupings.push_back(Grouping{*level, start, end});
      } else {
        diagnostics.push_back({Severity::kWarning, std::string(file_name), location,
                               "unknown record '" + kind + "' skipped"});
      }
    } catch (const LineError& e) {
      diagnostics.push_back({Severity::kError, std::string(file_name), location, e.what()});
      failed = true;
    }
  }
  if (failed) return result;

  if (content.notes.empty()) {
    diagnostics.push_back({Severity::kError, std::string(file_name), "", "empty score: no notes"});
    return result;
  }

  int max_voice = 0;
  for (const Note& note : content.notes) max_voice = std::max(max_voice, note.voice);
  if (declared_voices) {
    if (max_voice >= *declared_voices) {
      diagnostics.push_back({Severity::kError, std::string(file_name), "",
                             "note voice " + std::to_string(max_voice) + " exceeds Voice count"});
      return result;
    }
    content.voice_count = *declared_voices;
  } else {
    content.voice_count = max_voice + 1;
  }

  detail::pullFirstToOnset(content.keys, content.notes, "key signature", diagnostics, file_name);
  detail::pullFirstToOnset(content.meters, content.notes, "time signature", diagnostics, file_name);

  try {
    result.score.emplace(std::move(content));
  } catch (const InvalidScoreError& e) {
    diagnostics.push_back({Severity::kError, std::string(file_name), "", e.what()});
  }
  return result;
}

ParseResult parseInterchangeText(std::string_view text, std::string_view file_name) {
  std::istringstream input{std::string(text)};
  return parseInterchangeText(input, file_name);
}

void writeInterchangeText(const Score& score, std::ostream& out) {
  out << "Voice " << score.voiceCount() << '\n';
  for (const KeySignature& key : score.keys()) {
    out << "Key " << formatExact(key.start) << ' ' << key.tonic << ' '
        << (key.mode == Mode::kMajor ? "Maj" : "Min") << '\n';
  }
  for (const TimeSignature& meter : score.meters()) {
    out << "Meter " << formatExact(meter.start) << ' ' << meter.numerator << ' '
        << meter.denominator << '\n';
  }
  for (const ChordSymbol& symbol : score.chordSymbols()) {
    out << "Chord " << formatExact(symbol.start) << ' ' << formatChordLabel(symbol.label) << '\n';
  }
  for (const Time& bar : score.barLines()) out << "Bar " << formatExact(bar) << '\n';
  for (const Grouping& grouping : score.explicitGroupings()) {
    out << "Grouping " << groupingLevelName(grouping.level) << ' ' << formatExact(grouping.start)
        << ' ' << formatExact(grouping.end) << '\n';
  }
  for (const Note& note : score.notes()) {
    std::string onset = formatExact(note.onset);
    out << "Note " << note.pitch.midi << ' ' << onset << ' ' << onset << ' '
        << formatExact(note.offset) << ' ' << note.voice << '\n';
  }
}

std::string toInterchangeText(const Score& score) {
  std::ostringstream out;
  writeInterchangeText(score, out);
  return out.str();
}

ParseResult parseScoreFile(const std::string& path) {
  std::ifstream input(path, std::ios::binary);
  if (!input) {
    ParseResult result;
    result.diagnostics.push_back({Severity::kError, path, "", "cannot open file"});
    return result;
  }
  std::string extension = std::filesystem::path(path).extension().string();
  std::transform(extension.begin(), extension.end(), extension.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (extension == ".musicxml" || extension == ".xml") return parseMusicXml(input, path);
  return parseInterchangeText(input, path);
}

}  // namespace mv2h
