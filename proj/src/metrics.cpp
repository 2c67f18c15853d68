#include "mv2h/metrics.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace mv2h {

MatchMode MatchMode::preAligned() { return preAligned(Time(50), Time(50)); }

MatchMode MatchMode::preAligned(Time onset_tolerance, Time grouping_tolerance) {
  MatchMode mode;
  mode.kind = AlignmentKind::kPreAligned;
  mode.onset_tolerance = std::move(onset_tolerance);
  mode.grouping_tolerance = std::move(grouping_tolerance);
  mode.duration_tolerance_ratio = Rational(1, 2);
  mode.duration_tolerance_floor = Time(50);
  return mode;
}

MatchMode MatchMode::autoAligned() {
  MatchMode mode;
  mode.kind = AlignmentKind::kAutoAligned;
  return mode;
}

Rational fMeasure(std::size_t true_positives, std::size_t false_positives,
                  std::size_t false_negatives) {
  std::size_t denominator = 2 * true_positives + false_positives + false_negatives;
  if (denominator == 0) return 1;
  Rational f1(static_cast<unsigned long>(2 * true_positives),
              static_cast<unsigned long>(denominator));
  f1.canonicalize();
  return f1;
}

namespace {

struct Candidate {
  Rational distance;
  std::size_t transcribed;
  std::size_t ground_truth;
};

bool candidateOrder(const Candidate& lhs, const Candidate& rhs) {
  if (lhs.distance != rhs.distance) return lhs.distance < rhs.distance;
  if (lhs.transcribed != rhs.transcribed) return lhs.transcribed < rhs.transcribed;
  return lhs.ground_truth < rhs.ground_truth;
}

/// Greedy one-to-one selection in candidate order.
std::vector<std::pair<std::size_t, std::size_t>> greedyPairs(std::vector<Candidate> candidates,
                                                             std::size_t t_count,
                                                             std::size_t g_count) {
  std::sort(candidates.begin(), candidates.end(), candidateOrder);
  std::vector<bool> t_used(t_count, false);
  std::vector<bool> g_used(g_count, false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const Candidate& candidate : candidates) {
    if (t_used[candidate.transcribed] || g_used[candidate.ground_truth]) continue;
    t_used[candidate.transcribed] = true;
    g_used[candidate.ground_truth] = true;
    pairs.emplace_back(candidate.transcribed, candidate.ground_truth);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace

NoteMatching matchNotes(const Score& transcription, const Score& ground_truth,
                        const MatchMode& mode) {
  const auto& t_notes = transcription.notes();
  const auto& g_notes = ground_truth.notes();

  // Ground-truth notes by pitch; each list is in onset order.
  std::map<int, std::vector<std::size_t>> by_pitch;
  for (std::size_t g = 0; g < g_notes.size(); ++g) by_pitch[g_notes[g].pitch.midi].push_back(g);

  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t < t_notes.size(); ++t) {
    auto it = by_pitch.find(t_notes[t].pitch.midi);
    if (it == by_pitch.end()) continue;
    const auto& same_pitch = it->second;
    Time earliest = t_notes[t].onset - mode.onset_tolerance;
    auto first = std::lower_bound(same_pitch.begin(), same_pitch.end(), earliest,
                                  [&](std::size_t g, const Time& value) {
                                    return g_notes[g].onset < value;
                                  });
    for (auto g = first; g != same_pitch.end(); ++g) {
      Rational difference = abs(g_notes[*g].onset - t_notes[t].onset);
      if (g_notes[*g].onset > t_notes[t].onset && difference > mode.onset_tolerance) break;
      if (difference <= mode.onset_tolerance) candidates.push_back({difference, t, *g});
    }
  }

  NoteMatching matching;
  matching.pairs = greedyPairs(std::move(candidates), t_notes.size(), g_notes.size());
  std::vector<bool> t_used(t_notes.size(), false);
  std::vector<bool> g_used(g_notes.size(), false);
  for (const auto& [t, g] : matching.pairs) {
    t_used[t] = true;
    g_used[g] = true;
  }
  for (std::size_t t = 0; t < t_notes.size(); ++t) {
    if (!t_used[t]) matching.unmatched_transcribed.push_back(t);
  }
  for (std::size_t g = 0; g < g_notes.size(); ++g) {
    if (!g_used[g]) matching.unmatched_ground_truth.push_back(g);
  }
  return matching;
}

Rational multiPitchScore(const NoteMatching& matching) {
  return fMeasure(matching.pairs.size(), matching.unmatched_transcribed.size(),
                  matching.unmatched_ground_truth.size());
}

namespace {

/// Consecutive note pairs within each voice, as indices into score.notes().
std::vector<std::pair<std::size_t, std::size_t>> voiceLinks(const Score& score) {
  std::vector<std::vector<std::size_t>> voices(static_cast<std::size_t>(score.voiceCount()));
  for (std::size_t i = 0; i < score.notes().size(); ++i) {
    voices[static_cast<std::size_t>(score.notes()[i].voice)].push_back(i);
  }
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (auto& voice : voices) {
    // Score order within one voice is onset, then pitch.
    for (std::size_t k = 1; k < voice.size(); ++k) links.emplace_back(voice[k - 1], voice[k]);
  }
  return links;
}

}  // namespace

Rational voiceScore(const NoteMatching& matching, const Score& transcription,
                    const Score& ground_truth) {
  auto t_links = voiceLinks(transcription);
  auto g_links = voiceLinks(ground_truth);

  std::map<std::size_t, std::size_t> partner;
  for (const auto& [t, g] : matching.pairs) partner[t] = g;
  std::set<std::pair<std::size_t, std::size_t>> g_link_set(g_links.begin(), g_links.end());

  std::size_t true_positives = 0;
  for (const auto& [from, to] : t_links) {
    auto a = partner.find(from);
    auto b = partner.find(to);
    if (a == partner.end() || b == partner.end()) continue;
    if (g_link_set.count({a->second, b->second}) != 0) ++true_positives;
  }
  return fMeasure(true_positives, t_links.size() - true_positives,
                  g_links.size() - true_positives);
}

ComponentResult meterScore(const Score& transcription, const Score& ground_truth,
                           const MatchMode& mode) {
  std::vector<Grouping> t_groupings;
  std::vector<Grouping> g_groupings;
  try {
    t_groupings = generateGroupings(transcription);
  } catch (const MissingMeterError&) {
    return {0, {"meter: transcription has no time signature"}};
  }
  try {
    g_groupings = generateGroupings(ground_truth);
  } catch (const MissingMeterError&) {
    return {0, {"meter: ground truth has no time signature"}};
  }

  std::vector<std::size_t> g_order(g_groupings.size());
  for (std::size_t i = 0; i < g_order.size(); ++i) g_order[i] = i;
  std::sort(g_order.begin(), g_order.end(), [&](std::size_t a, std::size_t b) {
    return g_groupings[a].start < g_groupings[b].start;
  });

  const Time& tolerance = mode.grouping_tolerance;
  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t < t_groupings.size(); ++t) {
    const Grouping& tg = t_groupings[t];
    Time earliest = tg.start - tolerance;
    auto first = std::lower_bound(g_order.begin(), g_order.end(), earliest,
                                  [&](std::size_t g, const Time& value) {
                                    return g_groupings[g].start < value;
                                  });
    for (auto it = first; it != g_order.end(); ++it) {
      const Grouping& gg = g_groupings[*it];
      if (gg.start - tg.start > tolerance) break;
      Rational start_gap = abs(gg.start - tg.start);
      Rational end_gap = abs(gg.end - tg.end);
      if (start_gap <= tolerance && end_gap <= tolerance) {
        candidates.push_back({start_gap + end_gap, t, *it});
      }
    }
  }
  std::size_t true_positives =
      greedyPairs(std::move(candidates), t_groupings.size(), g_groupings.size()).size();
  return {fMeasure(true_positives, t_groupings.size() - true_positives,
                   g_groupings.size() - true_positives),
          {}};
}

Rational valueScore(const NoteMatching& matching, const Score& transcription,
                    const Score& ground_truth, const MatchMode& mode) {
  if (matching.pairs.empty()) return 1;
  std::size_t correct = 0;
  for (const auto& [t, g] : matching.pairs) {
    Time g_duration = ground_truth.notes()[g].duration();
    Rational difference = abs(transcription.notes()[t].duration() - g_duration);
    Rational tolerance = mode.duration_tolerance_ratio * g_duration;
    if (tolerance < mode.duration_tolerance_floor) tolerance = mode.duration_tolerance_floor;
    if (difference <= tolerance) ++correct;
  }
  Rational score(static_cast<unsigned long>(correct),
                 static_cast<unsigned long>(matching.pairs.size()));
  score.canonicalize();
  return score;
}

Rational keyScoreSingle(const KeySignature& transcribed, const KeySignature& ground_truth) {
  if (transcribed.sameKey(ground_truth)) return 1;
  const int interval = ((transcribed.tonic - ground_truth.tonic) % 12 + 12) % 12;
  if (transcribed.mode == ground_truth.mode) {
    if (interval == 7 || interval == 5) return Rational(1, 2);
    return 0;
  }
  // Relative minor lies 9 semitones above its major.
  if (ground_truth.mode == Mode::kMajor && interval == 9) return Rational(3, 10);
  if (ground_truth.mode == Mode::kMinor && interval == 3) return Rational(3, 10);
  if (interval == 0) return Rational(1, 5);
  return 0;
}

ComponentResult keyChangeScore(const Score& transcription, const Score& ground_truth) {
  if (ground_truth.keys().empty()) return {0, {"harmony: ground truth has no key signature"}};
  if (transcription.keys().empty()) return {0, {"harmony: transcription has no key signature"}};

  const Span& span = ground_truth.span();
  if (span.length() <= 0) {
    return {keyScoreSingle(*activeAt(transcription.keys(), span.first_onset),
                           *activeAt(ground_truth.keys(), span.first_onset)),
            {}};
  }
  Rational total;
  for (const KeySection& section : continuousKeySections(transcription, ground_truth)) {
    total += keyScoreSingle(section.transcription_key, section.ground_truth_key) *
             (section.end - section.start) / span.length();
  }
  return {total, {}};
}

namespace {

/// Chord symbol in force at t; nullptr before the first one.
const ChordSymbol* activeChord(const std::vector<ChordSymbol>& symbols, const Time& t) {
  const ChordSymbol* active = nullptr;
  for (const ChordSymbol& symbol : symbols) {
    if (symbol.start > t) break;
    active = &symbol;
  }
  return active;
}

bool chordsAgree(const ChordSymbol* lhs, const ChordSymbol* rhs) {
  if (lhs == nullptr || rhs == nullptr) return lhs == rhs;
  return lhs->label.matches(rhs->label);
}

}  // namespace

Rational chordProgressionScore(const Score& transcription, const Score& ground_truth) {
  const Span& span = ground_truth.span();
  const auto& t_symbols = transcription.chordSymbols();
  const auto& g_symbols = ground_truth.chordSymbols();
  if (span.length() <= 0) {
    return chordsAgree(activeChord(t_symbols, span.first_onset),
                       activeChord(g_symbols, span.first_onset))
               ? 1
               : 0;
  }

  std::set<Time> cuts = {span.first_onset, span.last_offset};
  for (const auto* symbols : {&t_symbols, &g_symbols}) {
    for (const ChordSymbol& symbol : *symbols) {
      if (symbol.start > span.first_onset && symbol.start < span.last_offset) {
        cuts.insert(symbol.start);
      }
    }
  }
  Rational agreeing;
  for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
    if (chordsAgree(activeChord(t_symbols, *it), activeChord(g_symbols, *it))) {
      agreeing += *std::next(it) - *it;
    }
  }
  return agreeing / span.length();
}

ComponentResult harmonyScore(const Score& transcription, const Score& ground_truth) {
  ComponentResult key = keyChangeScore(transcription, ground_truth);
  if (transcription.chordSymbols().empty() || ground_truth.chordSymbols().empty()) return key;
  key.score = (key.score + chordProgressionScore(transcription, ground_truth)) / 2;
  return key;
}

EvaluationReport evaluate(const Score& transcription, const Score& ground_truth,
                          const MatchMode& mode) {
  EvaluationReport report;
  NoteMatching matching = matchNotes(transcription, ground_truth, mode);
  report.multi_pitch = multiPitchScore(matching);
  report.voice = voiceScore(matching, transcription, ground_truth);

  ComponentResult meter = meterScore(transcription, ground_truth, mode);
  report.meter = meter.score;
  report.diagnostics.insert(report.diagnostics.end(), meter.diagnostics.begin(),
                            meter.diagnostics.end());

  report.value = valueScore(matching, transcription, ground_truth, mode);

  ComponentResult harmony = harmonyScore(transcription, ground_truth);
  report.harmony = harmony.score;
  report.diagnostics.insert(report.diagnostics.end(), harmony.diagnostics.begin(),
                            harmony.diagnostics.end());

  report.mv2h =
      (report.multi_pitch + report.voice + report.meter + report.value + report.harmony) / 5;
  return report;
}

}  // namespace mv2h
