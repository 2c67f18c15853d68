#include "mv2h/alignment.h"

#include <algorithm>
#include <cstdint>

namespace mv2h {

namespace {

std::vector<int> sortedPitches(const Chord& chord) {
  std::vector<int> pitches;
  pitches.reserve(chord.notes.size());
  for (const Note& note : chord.notes) pitches.push_back(note.pitch.midi);
  std::sort(pitches.begin(), pitches.end());
  return pitches;
}

/// Size of the multiset intersection of two sorted pitch lists.
std::size_t sharedPitchCount(const std::vector<int>& lhs, const std::vector<int>& rhs) {
  std::size_t shared = 0;
  auto a = lhs.begin();
  auto b = rhs.begin();
  while (a != lhs.end() && b != rhs.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++shared;
      ++a;
      ++b;
    }
  }
  return shared;
}

Rational distanceFromPitches(const std::vector<int>& transcribed,
                             const std::vector<int>& ground_truth) {
  std::size_t total = transcribed.size() + ground_truth.size();
  if (total == 0) return 0;
  std::size_t shared = sharedPitchCount(transcribed, ground_truth);
  // F1 = 2 TP / (2 TP + FP + FN) = 2 TP / (|T| + |G|)
  Rational f1(static_cast<unsigned long>(2 * shared), static_cast<unsigned long>(total));
  f1.canonicalize();
  return 1 - f1;
}

enum class Move : std::uint8_t { kMatch, kGapTranscribed, kGapGroundTruth };

}  // namespace

Rational chordDistance(const Chord& transcribed, const Chord& ground_truth) {
  return distanceFromPitches(sortedPitches(transcribed), sortedPitches(ground_truth));
}

AlignmentPath dtwAlign(const std::vector<Chord>& transcribed,
                       const std::vector<Chord>& ground_truth, const Rational& gap_penalty) {
  if (transcribed.empty()) throw EmptySequenceError("empty transcription");
  if (ground_truth.empty()) throw EmptySequenceError("empty ground truth");

  const std::size_t rows = transcribed.size();
  const std::size_t cols = ground_truth.size();
  std::vector<std::vector<int>> t_pitches;
  std::vector<std::vector<int>> g_pitches;
  for (const Chord& chord : transcribed) t_pitches.push_back(sortedPitches(chord));
  for (const Chord& chord : ground_truth) g_pitches.push_back(sortedPitches(chord));

  // Two rolling cost rows; moves are kept for the whole table.
  std::vector<Move> moves((rows + 1) * (cols + 1), Move::kMatch);
  auto move = [&](std::size_t i, std::size_t j) -> Move& { return moves[i * (cols + 1) + j]; };

  std::vector<Rational> previous(cols + 1);
  std::vector<Rational> current(cols + 1);
  for (std::size_t j = 1; j <= cols; ++j) {
    previous[j] = previous[j - 1] + gap_penalty;
    move(0, j) = Move::kGapTranscribed;
  }

  Rational candidate;
  for (std::size_t i = 1; i <= rows; ++i) {
    current[0] = previous[0] + gap_penalty;
    move(i, 0) = Move::kGapGroundTruth;
    for (std::size_t j = 1; j <= cols; ++j) {
      Rational best = previous[j - 1] + distanceFromPitches(t_pitches[i - 1], g_pitches[j - 1]);
      Move best_move = Move::kMatch;
      candidate = current[j - 1] + gap_penalty;
      if (candidate < best) {
        best = candidate;
        best_move = Move::kGapTranscribed;
      }
      candidate = previous[j] + gap_penalty;
      if (candidate < best) {
        best = candidate;
        best_move = Move::kGapGroundTruth;
      }
      current[j] = best;
      move(i, j) = best_move;
    }
    std::swap(previous, current);
  }

  AlignmentPath path;
  path.total_cost = previous[cols];
  std::size_t i = rows;
  std::size_t j = cols;
  while (i > 0 || j > 0) {
    switch (move(i, j)) {
      case Move::kMatch:
        path.steps.push_back({i - 1, j - 1});
        --i;
        --j;
        break;
      case Move::kGapTranscribed:
        path.steps.push_back({std::nullopt, j - 1});
        --j;
        break;
      case Move::kGapGroundTruth:
        path.steps.push_back({i - 1, std::nullopt});
        --i;
        break;
    }
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

AnchorSet extractAnchors(const AlignmentPath& path, const std::vector<Chord>& transcribed,
                         const std::vector<Chord>& ground_truth) {
  AnchorSet result;
  for (const AlignmentStep& step : path.steps) {
    if (!step.isMatch()) continue;
    const Chord& t_chord = transcribed.at(*step.transcribed);
    const Chord& g_chord = ground_truth.at(*step.ground_truth);
    if (chordDistance(t_chord, g_chord) >= 1) continue;
    if (!result.anchors.empty()) {
      const Anchor& last = result.anchors.back();
      if (t_chord.onset <= last.transcribed || g_chord.onset <= last.ground_truth) continue;
    }
    result.anchors.push_back({t_chord.onset, g_chord.onset});
  }
  return result;
}

TimeMap::TimeMap(const AnchorSet& anchors, const Span& transcription_span,
                 const Span& ground_truth_span)
    : scale_(1) {
  if (anchors.anchors.size() >= 2) {
    anchors_ = anchors.anchors;
    return;
  }
  if (transcription_span.length() > 0 && ground_truth_span.length() > 0) {
    scale_ = ground_truth_span.length() / transcription_span.length();
  }
  if (anchors.anchors.size() == 1) {
    origin_ = anchors.anchors.front();
  } else {
    origin_ = {transcription_span.first_onset, ground_truth_span.first_onset};
  }
}

Time TimeMap::operator()(const Time& t) const {
  if (anchors_.empty()) return origin_.ground_truth + (t - origin_.transcribed) * scale_;

  // Segment whose transcription interval contains t, or the nearest end segment.
  auto upper = std::upper_bound(anchors_.begin(), anchors_.end(), t,
                                [](const Time& value, const Anchor& anchor) {
                                  return value < anchor.transcribed;
                                });
  std::size_t right = static_cast<std::size_t>(upper - anchors_.begin());
  right = std::clamp<std::size_t>(right, 1, anchors_.size() - 1);
  const Anchor& a = anchors_[right - 1];
  const Anchor& b = anchors_[right];
  return a.ground_truth +
         (t - a.transcribed) * (b.ground_truth - a.ground_truth) / (b.transcribed - a.transcribed);
}

Score remapTimes(const Score& transcription, const AnchorSet& anchors,
                 const Span& ground_truth_span) {
  const TimeMap map(anchors, transcription.span(), ground_truth_span);
  ScoreContent content = transcription.content();

  for (Note& note : content.notes) {
    note.onset = map(note.onset);
    note.offset = map(note.offset);
  }
  for (KeySignature& key : content.keys) key.start = map(key.start);
  for (TimeSignature& meter : content.meters) meter.start = map(meter.start);
  for (ChordSymbol& symbol : content.chord_symbols) symbol.start = map(symbol.start);
  for (Time& bar : content.bar_lines) bar = map(bar);

  if (!transcription.meters().empty() || !transcription.explicitGroupings().empty()) {
    content.groupings = generateGroupings(transcription);
    for (Grouping& grouping : content.groupings) {
      grouping.start = map(grouping.start);
      grouping.end = map(grouping.end);
    }
  }
  return Score(std::move(content));
}

AlignmentResult alignScores(const Score& transcription, const Score& ground_truth,
                            const Rational& gap_penalty) {
  std::vector<Chord> t_chords = buildChordSequence(transcription);
  std::vector<Chord> g_chords = buildChordSequence(ground_truth);
  AlignmentPath path = dtwAlign(t_chords, g_chords, gap_penalty);
  AnchorSet anchors = extractAnchors(path, t_chords, g_chords);
  Score remapped = remapTimes(transcription, anchors, ground_truth.span());
  return AlignmentResult{std::move(path), std::move(anchors), std::move(remapped)};
}

}  // namespace mv2h
