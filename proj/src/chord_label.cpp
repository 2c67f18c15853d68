#include <array>
#include <utility>

#include "mv2h/score.h"

namespace mv2h {

namespace {

constexpr std::array<std::string_view, 12> kRootNames = {
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"};

struct QualityAlias {
  std::string_view spelling;
  std::string_view normalized;
};

// Short spellings and MusicXML <kind> values.
constexpr QualityAlias kQualityAliases[] = {
    {"maj", "maj"},         {"M", "maj"},           {"major", "maj"},
    {"min", "min"},         {"m", "min"},           {"-", "min"},
    {"minor", "min"},       {"dim", "dim"},         {"o", "dim"},
    {"diminished", "dim"},  {"aug", "aug"},         {"+", "aug"},
    {"augmented", "aug"},   {"7", "7"},             {"dom7", "7"},
    {"dominant", "7"},      {"maj7", "maj7"},       {"M7", "maj7"},
    {"major-seventh", "maj7"}, {"min7", "min7"},    {"m7", "min7"},
    {"-7", "min7"},         {"minor-seventh", "min7"}, {"dim7", "dim7"},
    {"o7", "dim7"},         {"diminished-seventh", "dim7"}, {"hdim7", "hdim7"},
    {"m7b5", "hdim7"},      {"half-diminished", "hdim7"}, {"sus2", "sus2"},
    {"suspended-second", "sus2"}, {"sus4", "sus4"}, {"sus", "sus4"},
    {"suspended-fourth", "sus4"},
};

int stepPitchClass(char step) {
  switch (step) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return 5;
    case 'G': return 7;
    case 'A': return 9;
    case 'B': return 11;
    default: return -1;
  }
}

}  // namespace

bool ChordLabel::matches(const ChordLabel& other) const {
  if (root != other.root) return false;
  if (quality.empty() || other.quality.empty()) return true;
  return quality == other.quality;
}

std::string normalizeChordQuality(std::string_view quality) {
  for (const auto& alias : kQualityAliases) {
    if (alias.spelling == quality) return std::string(alias.normalized);
  }
  return std::string(quality);
}

std::optional<ChordLabel> parseChordLabel(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int root = stepPitchClass(text.front());
  if (root < 0) return std::nullopt;
  text.remove_prefix(1);
  while (!text.empty() && (text.front() == '#' || text.front() == 'b')) {
    root += text.front() == '#' ? 1 : -1;
    text.remove_prefix(1);
  }
  root = ((root % 12) + 12) % 12;

  if (auto slash = text.find('/'); slash != std::string_view::npos) text = text.substr(0, slash);
  if (!text.empty() && text.front() == ':') {
    text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
  }
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == ':') return std::nullopt;
  }
  return ChordLabel{root, normalizeChordQuality(text)};
}

std::string formatChordLabel(const ChordLabel& label) {
  std::string out(kRootNames[static_cast<std::size_t>(label.root)]);
  if (!label.quality.empty()) {
    out += ':';
    out += label.quality;
  }
  return out;
}

}  // namespace mv2h
