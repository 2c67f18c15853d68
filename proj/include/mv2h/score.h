// Canonical in-memory score model and the structures derived from it:
// chord sequences, metrical groupings and continuous key sections.

#ifndef MV2H_SCORE_H
#define MV2H_SCORE_H

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mv2h/rational.h"

namespace mv2h {

/// Nominal length of a quarter note in Time units.
inline constexpr int kQuarterNoteUnits = 1000;

/// MIDI note number, 0-127.
struct Pitch {
  int midi = 0;

  auto operator<=>(const Pitch&) const = default;
};

struct Note {
  Pitch pitch;
  Time onset;
  Time offset;
  int voice = 0;

  Time duration() const { return offset - onset; }
  bool operator==(const Note&) const = default;
};

/// All notes sharing one onset, across every voice.
struct Chord {
  Time onset;
  std::vector<Note> notes;
};

enum class Mode { kMajor, kMinor };

struct KeySignature {
  int tonic = 0;  // pitch class 0-11
  Mode mode = Mode::kMajor;
  Time start;

  bool sameKey(const KeySignature& other) const {
    return tonic == other.tonic && mode == other.mode;
  }
  bool operator==(const KeySignature&) const = default;
};

struct TimeSignature {
  int numerator = 4;
  int denominator = 4;
  Time start;

  /// 6/8, 9/8, 12/8, ...: numerator a multiple of 3 greater than 3.
  bool isCompound() const { return numerator > 3 && numerator % 3 == 0; }
  int beatsPerBar() const { return isCompound() ? numerator / 3 : numerator; }
  int subBeatsPerBeat() const { return isCompound() ? 3 : 2; }

  Time unitLength() const;  // one denominator unit
  Time beatLength() const;
  Time subBeatLength() const;
  Time barLength() const;

  bool operator==(const TimeSignature&) const = default;
};

enum class GroupingLevel { kBar, kBeat, kSubBeat };

std::string_view groupingLevelName(GroupingLevel level);
std::optional<GroupingLevel> parseGroupingLevel(std::string_view name);

struct Grouping {
  GroupingLevel level = GroupingLevel::kBar;
  Time start;
  Time end;

  bool operator==(const Grouping&) const = default;
};

/// Root pitch class plus a normalized quality ("maj", "min7", ...).
/// An empty quality means the label carries only a root.
struct ChordLabel {
  int root = 0;
  std::string quality;

  /// Root-only labels on either side compare by root alone.
  bool matches(const ChordLabel& other) const;
  bool operator==(const ChordLabel&) const = default;
};

/// @brief Parse a chord label such as "C", "F#m", "Bb:min7" or "G7".
/// Bass inversions ("/E") are dropped. Returns nullopt for malformed labels.
std::optional<ChordLabel> parseChordLabel(std::string_view text);

/// Canonical spelling: sharps for the root, ':' before the quality ("F#:min").
std::string formatChordLabel(const ChordLabel& label);

/// Map a quality spelling or a MusicXML <kind> value onto the normalized vocabulary.
/// Unknown qualities are returned unchanged.
std::string normalizeChordQuality(std::string_view quality);

struct ChordSymbol {
  ChordLabel label;
  Time start;

  bool operator==(const ChordSymbol&) const = default;
};

struct Span {
  Time first_onset;
  Time last_offset;

  Time length() const { return last_offset - first_onset; }
  bool operator==(const Span&) const = default;
};

/// Raw score fields. Scores are built from this and validated once.
struct ScoreContent {
  std::vector<Note> notes;
  int voice_count = 0;
  std::vector<KeySignature> keys;
  std::vector<TimeSignature> meters;
  std::vector<ChordSymbol> chord_symbols;
  /// Explicit bar boundaries (every bar start plus the final bar end), when known.
  std::vector<Time> bar_lines;
  /// Explicit metrical groupings. When non-empty they replace generated ones;
  /// remapped scores carry their groupings this way.
  std::vector<Grouping> groupings;

  bool operator==(const ScoreContent&) const = default;
};

class InvalidScoreError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Immutable, validated score. Notes are kept in (onset, voice, pitch, offset)
/// order; keys, meters, chord symbols and bar lines strictly ascending.
class Score {
 public:
  Score() = default;
  /// @throws InvalidScoreError when an invariant does not hold.
  explicit Score(ScoreContent content);

  const ScoreContent& content() const { return content_; }
  const std::vector<Note>& notes() const { return content_.notes; }
  int voiceCount() const { return content_.voice_count; }
  const std::vector<KeySignature>& keys() const { return content_.keys; }
  const std::vector<TimeSignature>& meters() const { return content_.meters; }
  const std::vector<ChordSymbol>& chordSymbols() const { return content_.chord_symbols; }
  const std::vector<Time>& barLines() const { return content_.bar_lines; }
  const std::vector<Grouping>& explicitGroupings() const { return content_.groupings; }

  bool empty() const { return content_.notes.empty(); }
  /// First onset to last offset; {0, 0} for an empty score.
  const Span& span() const { return span_; }

  bool operator==(const Score& other) const { return content_ == other.content_; }

 private:
  ScoreContent content_;
  Span span_;
};

class MissingMeterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Group notes by exact onset. Chords are strictly ascending by onset.
std::vector<Chord> buildChordSequence(const Score& score);

/// @brief Bar, beat and sub-beat groupings tiling the score's metrical timeline.
///
/// Bars follow explicit bar lines when present, otherwise they are laid out
/// from the first time signature assuming it starts on a downbeat, with a new
/// bar at every time signature change. Bars are laid out until the last note
/// offset is covered. An opening bar shorter than its nominal length is a
/// pickup: its beats are counted back from its end.
///
/// @throws MissingMeterError if the score has no time signature.
std::vector<Grouping> generateGroupings(const Score& score);

struct KeySection {
  Time start;
  Time end;
  KeySignature transcription_key;
  KeySignature ground_truth_key;
};

/// @brief Split the ground truth's span at every key change of either score.
///
/// Before its first key change a score is taken to be in its first key.
/// Returns no sections when the span has zero length.
/// @throws std::invalid_argument if either score has no key signature.
std::vector<KeySection> continuousKeySections(const Score& transcription,
                                              const Score& ground_truth);

/// Last entry starting at or before t; the first entry when t precedes all.
/// Returns nullptr for an empty list.
template <typename Event>
const Event* activeAt(const std::vector<Event>& events, const Time& t) {
  if (events.empty()) return nullptr;
  const Event* active = &events.front();
  for (const Event& event : events) {
    if (event.start > t) break;
    active = &event;
  }
  return active;
}

}  // namespace mv2h

#endif  // MV2H_SCORE_H
