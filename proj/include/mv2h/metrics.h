// The five MV2H components (multi-pitch, voice, meter, note value, harmony)
// and their mean.

#ifndef MV2H_METRICS_H
#define MV2H_METRICS_H

#include <string>
#include <utility>
#include <vector>

#include "mv2h/rational.h"
#include "mv2h/score.h"

namespace mv2h {

enum class AlignmentKind { kPreAligned, kAutoAligned };

/// Matching thresholds. Auto-aligned evaluation matches exactly.
struct MatchMode {
  AlignmentKind kind = AlignmentKind::kAutoAligned;
  Time onset_tolerance;
  Time grouping_tolerance;
  /// A matched note's value is correct when the duration difference is at most
  /// max(ratio * ground-truth duration, floor).
  Rational duration_tolerance_ratio;
  Time duration_tolerance_floor;

  /// 50 ms onset and grouping windows, half the ground-truth duration (at least 50 ms) for values.
  static MatchMode preAligned();
  static MatchMode preAligned(Time onset_tolerance, Time grouping_tolerance);
  static MatchMode autoAligned();
};

/// Indices into the scores' note lists.
struct NoteMatching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (transcribed, ground truth)
  std::vector<std::size_t> unmatched_transcribed;
  std::vector<std::size_t> unmatched_ground_truth;
};

/// F1 from raw counts; 1 when there is nothing on either side.
Rational fMeasure(std::size_t true_positives, std::size_t false_positives,
                  std::size_t false_negatives);

/// @brief Pair notes of equal pitch whose onsets differ by at most the onset tolerance.
///
/// Greedy by ascending onset difference, ties broken by transcription then
/// ground-truth note order.
NoteMatching matchNotes(const Score& transcription, const Score& ground_truth,
                        const MatchMode& mode);

Rational multiPitchScore(const NoteMatching& matching);

/// @brief F1 over voice links (consecutive notes of one voice).
///
/// A transcribed link between two matched notes is a true positive when their
/// ground-truth partners are consecutive in one ground-truth voice. Notes in a
/// voice are ordered by onset, then pitch.
Rational voiceScore(const NoteMatching& matching, const Score& transcription,
                    const Score& ground_truth);

struct ComponentResult {
  Rational score;
  std::vector<std::string> diagnostics;
};

/// Metrical F-measure over bar, beat and sub-beat groupings, matched one-to-one
/// regardless of level when both endpoints lie within the grouping tolerance.
/// Scores 0 with a diagnostic when either score lacks a time signature.
ComponentResult meterScore(const Score& transcription, const Score& ground_truth,
                           const MatchMode& mode);

/// Fraction of matched pairs whose durations agree within the mode's tolerance; 1 with no pairs.
Rational valueScore(const NoteMatching& matching, const Score& transcription,
                    const Score& ground_truth, const MatchMode& mode);

/// 1 for the same key, 1/2 a fifth above or below in the same mode, 3/10 for
/// the relative key, 1/5 for the parallel key, 0 otherwise.
Rational keyScoreSingle(const KeySignature& transcribed, const KeySignature& ground_truth);

/// Key scores of the continuous key sections weighted by their share of the
/// ground truth's span. Scores 0 with a diagnostic when either score has no key.
ComponentResult keyChangeScore(const Score& transcription, const Score& ground_truth);

/// Share of the ground truth's span where the active chord symbols agree.
/// Before its first symbol a score has no active chord; two absent chords agree.
Rational chordProgressionScore(const Score& transcription, const Score& ground_truth);

/// Mean of the key and chord-progression scores; the key score alone when
/// either score has no chord symbols.
ComponentResult harmonyScore(const Score& transcription, const Score& ground_truth);

struct EvaluationReport {
  Rational multi_pitch;
  Rational voice;
  Rational meter;
  Rational value;
  Rational harmony;
  Rational mv2h;
  std::vector<std::string> diagnostics;
};

/// All five components and their arithmetic mean. In auto-aligned mode the
/// transcription must already be remapped onto the ground truth's timeline.
EvaluationReport evaluate(const Score& transcription, const Score& ground_truth,
                          const MatchMode& mode);

}  // namespace mv2h

#endif  // MV2H_METRICS_H
