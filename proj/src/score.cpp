#include "mv2h/score.h"

#include <algorithm>
#include <set>
#include <tuple>

namespace mv2h {

Time TimeSignature::unitLength() const {
  return Rational(4 * kQuarterNoteUnits) / denominator;
}

Time TimeSignature::beatLength() const {
  return isCompound() ? Time(unitLength() * 3) : unitLength();
}

Time TimeSignature::subBeatLength() const {
  return beatLength() / subBeatsPerBeat();
}

Time TimeSignature::barLength() const { return unitLength() * numerator; }

std::string_view groupingLevelName(GroupingLevel level) {
  switch (level) {
    case GroupingLevel::kBar:
      return "bar";
    case GroupingLevel::kBeat:
      return "beat";
    case GroupingLevel::kSubBeat:
      return "sub_beat";
  }
  return "bar";
}

std::optional<GroupingLevel> parseGroupingLevel(std::string_view name) {
  if (name == "bar") return GroupingLevel::kBar;
  if (name == "beat") return GroupingLevel::kBeat;
  if (name == "sub_beat") return GroupingLevel::kSubBeat;
  return std::nullopt;
}

namespace {

bool noteOrder(const Note& lhs, const Note& rhs) {
  if (lhs.onset != rhs.onset) return lhs.onset < rhs.onset;
  if (lhs.voice != rhs.voice) return lhs.voice < rhs.voice;
  if (lhs.pitch != rhs.pitch) return lhs.pitch < rhs.pitch;
  return lhs.offset < rhs.offset;
}

bool groupingOrder(const Grouping& lhs, const Grouping& rhs) {
  if (lhs.start != rhs.start) return lhs.start < rhs.start;
  if (lhs.level != rhs.level) return lhs.level < rhs.level;
  return lhs.end < rhs.end;
}

template <typename Event>
void sortStrictlyByStart(std::vector<Event>& events, const char* what) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& lhs, const Event& rhs) { return lhs.start < rhs.start; });
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].start == events[i - 1].start) {
      throw InvalidScoreError(std::string("two ") + what + " at time " +
                              formatExact(events[i].start));
    }
  }
}

void requireStartsByFirstOnset(const Time& first_start, const Span& span, bool has_notes,
                               const char* what) {
  if (has_notes && first_start > span.first_onset) {
    throw InvalidScoreError(std::string("first ") + what + " starts after the first note");
  }
}

}  // namespace

Score::Score(ScoreContent content) : content_(std::move(content)) {
  auto& c = content_;
  if (c.voice_count < 0) throw InvalidScoreError("negative voice count");

  for (const Note& note : c.notes) {
    if (note.pitch.midi < 0 || note.pitch.midi > 127) {
      throw InvalidScoreError("pitch " + std::to_string(note.pitch.midi) + " outside 0-127");
    }
    if (note.offset <= note.onset) {
      throw InvalidScoreError("note at " + formatExact(note.onset) + " has no duration");
    }
    if (note.voice < 0 || note.voice >= c.voice_count) {
      throw InvalidScoreError("note voice " + std::to_string(note.voice) + " is not declared");
    }
  }
  std::sort(c.notes.begin(), c.notes.end(), noteOrder);

  if (!c.notes.empty()) {
    span_.first_onset = c.notes.front().onset;
    span_.last_offset = c.notes.front().offset;
    for (const Note& note : c.notes) {
      if (note.offset > span_.last_offset) span_.last_offset = note.offset;
    }
  }

  for (const KeySignature& key : c.keys) {
    if (key.tonic < 0 || key.tonic > 11) throw InvalidScoreError("key tonic outside 0-11");
  }
  for (const TimeSignature& meter : c.meters) {
    static constexpr int kDenominators[] = {1, 2, 4, 8, 16, 32};
    if (meter.numerator < 1) throw InvalidScoreError("time signature numerator below 1");
    if (std::find(std::begin(kDenominators), std::end(kDenominators), meter.denominator) ==
        std::end(kDenominators)) {
      throw InvalidScoreError("time signature denominator " +
                              std::to_string(meter.denominator) + " unsupported");
    }
  }
  for (const ChordSymbol& symbol : c.chord_symbols) {
    if (symbol.label.root < 0 || symbol.label.root > 11) {
      throw InvalidScoreError("chord root outside 0-11");
    }
  }

  sortStrictlyByStart(c.keys, "key signatures");
  sortStrictlyByStart(c.meters, "time signatures");
  sortStrictlyByStart(c.chord_symbols, "chord symbols");
  if (!c.keys.empty()) requireStartsByFirstOnset(c.keys.front().start, span_, !c.notes.empty(), "key signature");
  if (!c.meters.empty()) requireStartsByFirstOnset(c.meters.front().start, span_, !c.notes.empty(), "time signature");

  std::sort(c.bar_lines.begin(), c.bar_lines.end());
  if (std::adjacent_find(c.bar_lines.begin(), c.bar_lines.end()) != c.bar_lines.end()) {
    throw InvalidScoreError("duplicate bar line");
  }

  for (const Grouping& grouping : c.groupings) {
    if (grouping.end <= grouping.start) throw InvalidScoreError("empty grouping");
  }
  std::sort(c.groupings.begin(), c.groupings.end(), groupingOrder);
}

std::vector<Chord> buildChordSequence(const Score& score) {
  std::vector<Chord> chords;
  // Notes are already ordered by onset.
  for (const Note& note : score.notes()) {
    if (chords.empty() || chords.back().onset != note.onset) {
      chords.push_back(Chord{note.onset, {}});
    }
    chords.back().notes.push_back(note);
  }
  return chords;
}

namespace {

struct Interval {
  Time start;
  Time end;
};

/// Cut points for bars of nominal length from `from` until `until` is covered,
/// restarting the bar at every time signature change.
void appendNominalBars(const Time& from, const Time& until,
                       const std::vector<TimeSignature>& meters, std::vector<Time>& cuts) {
  Time t = from;
  cuts.push_back(t);
  while (t < until) {
    const TimeSignature* meter = activeAt(meters, t);
    Time bar_end = t + meter->barLength();
    for (const TimeSignature& next : meters) {
      if (next.start > t) {
        if (next.start < bar_end) bar_end = next.start;
        break;
      }
    }
    cuts.push_back(bar_end);
    t = bar_end;
  }
}

/// Split [start, end) into pieces of `unit`, anchored at start, or at end when
/// `from_end` is set. The piece at the far side is clipped.
std::vector<Interval> subdivide(const Time& start, const Time& end, const Time& unit,
                                bool from_end) {
  std::vector<Interval> pieces;
  if (!from_end) {
    Time t = start;
    while (t < end) {
      Time next = t + unit;
      if (next > end) next = end;
      pieces.push_back({t, next});
      t = next;
    }
  } else {
    Time t = end;
    while (t > start) {
      Time prev = t - unit;
      if (prev < start) prev = start;
      pieces.push_back({prev, t});
      t = prev;
    }
    std::reverse(pieces.begin(), pieces.end());
  }
  return pieces;
}

}  // namespace

std::vector<Grouping> generateGroupings(const Score& score) {
  if (!score.explicitGroupings().empty()) return score.explicitGroupings();
  const auto& meters = score.meters();
  if (meters.empty()) throw MissingMeterError("score has no time signature");

  const auto& bar_lines = score.barLines();
  Time start = meters.front().start;
  if (!bar_lines.empty() && bar_lines.front() < start) start = bar_lines.front();

  Time target_end = start;
  if (!score.empty() && score.span().last_offset > target_end) {
    target_end = score.span().last_offset;
  }
  if (!bar_lines.empty() && bar_lines.back() > target_end) target_end = bar_lines.back();

  std::vector<Time> cuts;
  if (bar_lines.empty()) {
    appendNominalBars(start, target_end, meters, cuts);
  } else {
    cuts.push_back(start);
    cuts.insert(cuts.end(), bar_lines.begin(), bar_lines.end());
    for (const TimeSignature& meter : meters) {
      if (meter.start > bar_lines.front() && meter.start < bar_lines.back()) {
        cuts.push_back(meter.start);
      }
    }
    if (target_end > bar_lines.back()) {
      appendNominalBars(bar_lines.back(), target_end, meters, cuts);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Grouping> groupings;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Time& bar_start = cuts[i];
    const Time& bar_end = cuts[i + 1];
    const TimeSignature* meter = activeAt(meters, bar_start);
    bool pickup = i == 0 && !bar_lines.empty() && bar_end - bar_start < meter->barLength();

    groupings.push_back({GroupingLevel::kBar, bar_start, bar_end});
    for (const Interval& beat : subdivide(bar_start, bar_end, meter->beatLength(), pickup)) {
      groupings.push_back({GroupingLevel::kBeat, beat.start, beat.end});
      for (const Interval& sub : subdivide(beat.start, beat.end, meter->subBeatLength(), pickup)) {
        groupings.push_back({GroupingLevel::kSubBeat, sub.start, sub.end});
      }
    }
  }
  return groupings;
}

std::vector<KeySection> continuousKeySections(const Score& transcription,
                                              const Score& ground_truth) {
  if (transcription.keys().empty() || ground_truth.keys().empty()) {
    throw std::invalid_argument("key sections need a key signature in both scores");
  }
  const Span& span = ground_truth.span();
  std::set<Time> cuts = {span.first_onset, span.last_offset};
  for (const auto* keys : {&transcription.keys(), &ground_truth.keys()}) {
    for (const KeySignature& key : *keys) {
      if (key.start > span.first_onset && key.start < span.last_offset) cuts.insert(key.start);
    }
  }

  std::vector<KeySection> sections;
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    const Time& start = *it;
    sections.push_back(KeySection{start, *std::next(it),
                                  *activeAt(transcription.keys(), start),
                                  *activeAt(ground_truth.keys(), start)});
  }
  return sections;
}

}  // namespace mv2h
