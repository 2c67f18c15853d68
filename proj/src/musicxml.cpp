#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ingest_internal.h"
#include "mv2h/ingest.h"

namespace mv2h {

namespace {

namespace pt = boost::property_tree;

class ElementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::optional<std::string> childText(const pt::ptree& node, const char* name) {
  auto child = node.get_child_optional(name);
  if (!child) return std::nullopt;
  return child->data();
}

std::string attribute(const pt::ptree& node, const char* name) {
  return node.get<std::string>(std::string("<xmlattr>.") + name, "");
}

bool hasChild(const pt::ptree& node, const char* name) {
  return node.find(name) != node.not_found();
}

Rational requireNumber(const pt::ptree& node, const char* name) {
  auto text = childText(node, name);
  if (!text) throw ElementError(std::string("missing <") + name + ">");
  try {
    return parseRational(*text);
  } catch (const std::invalid_argument&) {
    throw ElementError(std::string("bad <") + name + "> value '" + *text + "'");
  }
}

int stepPitchClass(const std::string& step) {
  static const std::map<std::string, int> kSteps = {{"C", 0}, {"D", 2},  {"E", 4}, {"F", 5},
                                                    {"G", 7}, {"A", 9}, {"B", 11}};
  auto it = kSteps.find(step);
  if (it == kSteps.end()) throw ElementError("bad pitch step '" + step + "'");
  return it->second;
}

struct TieState {
  std::size_t note_index;
  int pitch;
};

/// Per-part reading state. Positions are already converted to Time.
struct PartReader {
  std::string id;
  Rational divisions = 1;
  Time position;
  Time last_onset;
  std::vector<Note> notes;              // voice holds the local voice index
  std::vector<std::string> voice_labels;
  std::vector<TieState> open_ties;
  std::map<Time, KeySignature> keys;
  std::map<Time, TimeSignature> meters;
  std::map<Time, ChordSymbol> chords;
  std::vector<Time> bar_lines;
};

class MusicXmlReader {
 public:
  explicit MusicXmlReader(std::string file) : file_(std::move(file)) {}

  ParseResult read(std::istream& input);

 private:
  void warn(const std::string& location, const std::string& message) {
    diagnostics_.push_back({Severity::kWarning, file_, location, message});
  }
  void fail(const std::string& location, const std::string& message) {
    diagnostics_.push_back({Severity::kError, file_, location, message});
  }

  void readPart(const pt::ptree& part, PartReader& reader);
  void readAttributes(const pt::ptree& attributes, PartReader& reader, const std::string& where);
  void readNote(const pt::ptree& note, PartReader& reader, const std::string& where);
  void readHarmony(const pt::ptree& harmony, PartReader& reader, const std::string& where);
  void checkJumps(const pt::ptree& node, const std::string& where);

  Time toTime(const Rational& divisions_count, const PartReader& reader) const {
    return divisions_count * kQuarterNoteUnits / reader.divisions;
  }

  std::string file_;
  std::vector<ParseDiagnostic> diagnostics_;
};

ParseResult MusicXmlReader::read(std::istream& input) {
  ParseResult result;
  pt::ptree tree;
  try {
    pt::read_xml(input, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    fail("line " + std::to_string(e.line()), "malformed XML: " + e.message());
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

  auto root = tree.get_child_optional("score-partwise");
  if (!root) {
    fail("", tree.get_child_optional("score-timewise")
                 ? "timewise MusicXML is not supported"
                 : "document root is not <score-partwise>");
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

  std::vector<PartReader> parts;
  for (const auto& [name, child] : *root) {
    if (name != "part") continue;
    PartReader& reader = parts.emplace_back();
    reader.id = attribute(child, "id");
    readPart(child, reader);
  }

  bool has_error = std::any_of(diagnostics_.begin(), diagnostics_.end(),
                               [](const ParseDiagnostic& d) { return d.severity == Severity::kError; });
  if (has_error) {
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

  ScoreContent content;
  std::map<Time, KeySignature> keys;
  std::map<Time, TimeSignature> meters;
  std::map<Time, ChordSymbol> chords;
  for (const PartReader& part : parts) {
    // Voices are renumbered densely, part by part, in ascending label order.
    std::vector<std::string> labels = part.voice_labels;
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::vector<int> global(part.voice_labels.size());
    for (std::size_t local = 0; local < part.voice_labels.size(); ++local) {
      auto it = std::find(labels.begin(), labels.end(), part.voice_labels[local]);
      global[local] = content.voice_count + static_cast<int>(it - labels.begin());
    }
    for (Note note : part.notes) {
      note.voice = global[static_cast<std::size_t>(note.voice)];
      content.notes.push_back(note);
    }
    content.voice_count += static_cast<int>(labels.size());

    const std::string where = "part[" + part.id + "]";
    for (const auto& [time, key] : part.keys) {
      auto [it, inserted] = keys.emplace(time, key);
      if (!inserted && !it->second.sameKey(key)) {
        warn(where, "key signature at " + formatExact(time) +
                        " differs from an earlier part; earlier part kept");
      }
    }
    for (const auto& [time, meter] : part.meters) {
      auto [it, inserted] = meters.emplace(time, meter);
      if (!inserted && (it->second.numerator != meter.numerator ||
                        it->second.denominator != meter.denominator)) {
        warn(where, "time signature at " + formatExact(time) +
                        " differs from an earlier part; earlier part kept");
      }
    }
    chords.insert(part.chords.begin(), part.chords.end());
  }

  if (content.notes.empty()) {
    fail("", "no note content");
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

  // Restated signatures carry no information.
  for (const auto& [time, key] : keys) {
    if (content.keys.empty() || !content.keys.back().sameKey(key)) content.keys.push_back(key);
  }
  for (const auto& [time, meter] : meters) {
    if (content.meters.empty() || content.meters.back().numerator != meter.numerator ||
        content.meters.back().denominator != meter.denominator) {
      content.meters.push_back(meter);
    }
  }
  for (const auto& [time, chord] : chords) content.chord_symbols.push_back(chord);
  if (!parts.empty()) content.bar_lines = parts.front().bar_lines;

  detail::pullFirstToOnset(content.keys, content.notes, "key signature", diagnostics_, file_);
  detail::pullFirstToOnset(content.meters, content.notes, "time signature", diagnostics_, file_);

  try {
    result.score.emplace(std::move(content));
  } catch (const InvalidScoreError& e) {
    fail("", e.what());
  }
  result.diagnostics = std::move(diagnostics_);
  return result;
}

void MusicXmlReader::readPart(const pt::ptree& part, PartReader& reader) {
  int measure_index = 0;
  for (const auto& [name, measure] : part) {
    if (name != "measure") continue;
    ++measure_index;
    std::string number = attribute(measure, "number");
    const std::string where = "part[" + reader.id + "]/measure[" +
                              (number.empty() ? std::to_string(measure_index) : number) + "]";

    Time measure_start = reader.position;
    Time measure_end = reader.position;
    int note_index = 0;
    for (const auto& [kind, element] : measure) {
      try {
        if (kind == "attributes") {
          readAttributes(element, reader, where);
        } else if (kind == "note") {
          ++note_index;
          readNote(element, reader, where + "/note[" + std::to_string(note_index) + "]");
        } else if (kind == "backup") {
          reader.position -= toTime(requireNumber(element, "duration"), reader);
        } else if (kind == "forward") {
          reader.position += toTime(requireNumber(element, "duration"), reader);
        } else if (kind == "harmony") {
          readHarmony(element, reader, where);
        } else if (kind == "barline") {
          if (hasChild(element, "repeat")) warn(where, "repeat not expanded");
          if (hasChild(element, "ending")) warn(where, "volta ending not expanded");
        } else if (kind == "direction" || kind == "sound") {
          checkJumps(element, where);
        }
      } catch (const ElementError& e) {
        fail(where + "/" + kind, e.what());
      }
      if (reader.position > measure_end) measure_end = reader.position;
    }
    reader.position = measure_end;
    if (reader.bar_lines.empty() || reader.bar_lines.back() != measure_start) {
      reader.bar_lines.push_back(measure_start);
    }
    if (measure_end > measure_start) {
      if (reader.bar_lines.back() != measure_end) reader.bar_lines.push_back(measure_end);
    }
  }
}

void MusicXmlReader::readAttributes(const pt::ptree& attributes, PartReader& reader,
                                    const std::string& where) {
  if (hasChild(attributes, "divisions")) {
    Rational divisions = requireNumber(attributes, "divisions");
    if (divisions <= 0) throw ElementError("divisions must be positive");
    reader.divisions = divisions;
  }

  bool key_seen = false;
  bool time_seen = false;
  for (const auto& [name, child] : attributes) {
    if (name == "key") {
      if (key_seen) continue;  // per-staff duplicates
      key_seen = true;
      if (!hasChild(child, "fifths")) {
        warn(where, "non-traditional key signature skipped");
        continue;
      }
      Rational fifths_value = requireNumber(child, "fifths");
      if (fifths_value.get_den() != 1) throw ElementError("bad <fifths>");
      int fifths = static_cast<int>(fifths_value.get_num().get_si());
      int major_tonic = ((7 * fifths) % 12 + 12) % 12;
      std::string mode = childText(child, "mode").value_or("major");
      KeySignature key{major_tonic, Mode::kMajor, reader.position};
      if (mode == "minor") {
        key = KeySignature{(major_tonic + 9) % 12, Mode::kMinor, reader.position};
      } else if (mode != "major" && mode != "none" && !mode.empty()) {
        warn(where, "mode '" + mode + "' read as major");
      }
      reader.keys[reader.position] = key;
    } else if (name == "time") {
      if (time_seen) continue;
      time_seen = true;
      if (hasChild(child, "senza-misura")) {
        warn(where, "senza-misura time signature skipped");
        continue;
      }
      auto beats = childText(child, "beats");
      auto beat_type = childText(child, "beat-type");
      if (!beats || !beat_type) throw ElementError("time signature needs <beats> and <beat-type>");
      int numerator = 0;
      std::stringstream parts(*beats);
      for (std::string term; std::getline(parts, term, '+');) {
        try {
          numerator += std::stoi(term);
        } catch (const std::exception&) {
          throw ElementError("bad <beats> value '" + *beats + "'");
        }
      }
      if (beats->find('+') != std::string::npos) {
        warn(where, "composite time signature " + *beats + " read as " + std::to_string(numerator));
      }
      int denominator = 0;
      try {
        denominator = std::stoi(*beat_type);
      } catch (const std::exception&) {
        throw ElementError("bad <beat-type> value '" + *beat_type + "'");
      }
      if (numerator < 1 || denominator < 1 || denominator > 32 ||
          (denominator & (denominator - 1)) != 0) {
        warn(where, "unsupported time signature " + *beats + "/" + *beat_type + " skipped");
        continue;
      }
      reader.meters[reader.position] = TimeSignature{numerator, denominator, reader.position};
    }
  }
}

void MusicXmlReader::readNote(const pt::ptree& note, PartReader& reader, const std::string& where) {
  if (hasChild(note, "grace")) {
    warn(where, "grace note dropped");
    return;
  }
  const bool chord_follower = hasChild(note, "chord");
  Time duration = toTime(requireNumber(note, "duration"), reader);
  Time onset = chord_follower ? reader.last_onset : reader.position;
  if (!chord_follower) {
    reader.last_onset = reader.position;
    reader.position += duration;
  }

  if (hasChild(note, "rest")) return;
  if (hasChild(note, "cue")) {
    warn(where, "cue note dropped");
    return;
  }
  if (hasChild(note, "unpitched")) {
    warn(where, "unpitched note skipped");
    return;
  }
  auto pitch_node = note.get_child_optional("pitch");
  if (!pitch_node) throw ElementError("note has no <pitch>, <rest> or <unpitched>");
  if (duration <= 0) {
    warn(where, "zero-duration note dropped");
    return;
  }

  auto step = childText(*pitch_node, "step");
  if (!step) throw ElementError("missing <step>");
  Rational octave = requireNumber(*pitch_node, "octave");
  if (octave.get_den() != 1) throw ElementError("bad <octave>");
  double alter = 0.0;
  if (auto alter_text = childText(*pitch_node, "alter")) {
    try {
      alter = std::stod(*alter_text);
    } catch (const std::exception&) {
      throw ElementError("bad <alter> value '" + *alter_text + "'");
    }
    if (alter != std::round(alter)) warn(where, "microtonal alter rounded");
  }
  int midi = (static_cast<int>(octave.get_num().get_si()) + 1) * 12 + stepPitchClass(*step) +
             static_cast<int>(std::lround(alter));
  if (midi < 0 || midi > 127) {
    warn(where, "pitch outside MIDI range skipped");
    return;
  }

  bool tie_start = false;
  bool tie_stop = false;
  auto scanTies = [&](const pt::ptree& node, const char* name) {
    for (const auto& [child_name, child] : node) {
      if (child_name != name) continue;
      std::string type = attribute(child, "type");
      if (type == "start") tie_start = true;
      if (type == "stop") tie_stop = true;
    }
  };
  scanTies(note, "tie");
  if (auto notations = note.get_child_optional("notations")) scanTies(*notations, "tied");

  std::string label = childText(note, "voice").value_or("1");
  auto label_it = std::find(reader.voice_labels.begin(), reader.voice_labels.end(), label);
  if (label_it == reader.voice_labels.end()) {
    reader.voice_labels.push_back(label);
    label_it = std::prev(reader.voice_labels.end());
  }
  int voice = static_cast<int>(label_it - reader.voice_labels.begin());

  if (tie_stop) {
    auto open = std::find_if(reader.open_ties.begin(), reader.open_ties.end(),
                             [&](const TieState& tie) {
                               return tie.pitch == midi &&
                                      reader.notes[tie.note_index].offset == onset;
                             });
    if (open != reader.open_ties.end()) {
      reader.notes[open->note_index].offset = onset + duration;
      if (!tie_start) reader.open_ties.erase(open);
      return;
    }
    warn(where, "tie stop without a matching start");
  }

  reader.notes.push_back(Note{Pitch{midi}, onset, onset + duration, voice});
  if (tie_start) reader.open_ties.push_back({reader.notes.size() - 1, midi});
}

void MusicXmlReader::readHarmony(const pt::ptree& harmony, PartReader& reader,
                                 const std::string& where) {
  auto root = harmony.get_child_optional("root");
  if (!root) {
    warn(where, "harmony without <root> skipped");
    return;
  }
  auto step = childText(*root, "root-step");
  if (!step) throw ElementError("harmony root has no <root-step>");
  int pitch_class = stepPitchClass(*step);
  if (auto alter = childText(*root, "root-alter")) {
    try {
      pitch_class += static_cast<int>(std::lround(std::stod(*alter)));
    } catch (const std::exception&) {
      throw ElementError("bad <root-alter> value '" + *alter + "'");
    }
  }
  std::string kind = childText(harmony, "kind").value_or("");
  if (kind == "none") return;

  Time start = reader.position;
  if (hasChild(harmony, "offset")) start += toTime(requireNumber(harmony, "offset"), reader);
  ChordLabel label{((pitch_class % 12) + 12) % 12, normalizeChordQuality(kind)};
  if (reader.chords.count(start) != 0) warn(where, "second harmony at the same time replaces the first");
  reader.chords[start] = ChordSymbol{label, start};
}

void MusicXmlReader::checkJumps(const pt::ptree& node, const std::string& where) {
  auto flag = [&](const pt::ptree& sound) {
    for (const char* jump : {"dacapo", "dalsegno", "tocoda", "fine"}) {
      if (!attribute(sound, jump).empty()) {
        warn(where, std::string(jump) + " marking not expanded");
      }
    }
  };
  if (node.find("<xmlattr>") != node.not_found()) flag(node);
  if (auto sound = node.get_child_optional("sound")) flag(*sound);
}

}  // namespace

ParseResult parseMusicXml(std::istream& input, std::string_view file_name) {
  return MusicXmlReader(std::string(file_name)).read(input);
}

ParseResult parseMusicXml(std::string_view document, std::string_view file_name) {
  std::istringstream input{std::string(document)};
  return parseMusicXml(input, file_name);
}

}  // namespace mv2h
