// DTW alignment of a transcription onto a ground truth over chord sequences,
// anchor extraction and piecewise-linear time remapping.

#ifndef MV2H_ALIGNMENT_H
#define MV2H_ALIGNMENT_H

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mv2h/rational.h"
#include "mv2h/score.h"

namespace mv2h {

/// Default insertion/deletion cost.
inline const Rational kDefaultGapPenalty{3, 5};

/// One DTW step. An empty side is a gap; both sides are never empty.
struct AlignmentStep {
  std::optional<std::size_t> transcribed;
  std::optional<std::size_t> ground_truth;

  bool isMatch() const { return transcribed && ground_truth; }
  bool operator==(const AlignmentStep&) const = default;
};

struct AlignmentPath {
  std::vector<AlignmentStep> steps;
  Rational total_cost;
};

struct Anchor {
  Time transcribed;
  Time ground_truth;

  bool operator==(const Anchor&) const = default;
};

/// Strictly increasing in both coordinates.
struct AnchorSet {
  std::vector<Anchor> anchors;
};

class EmptySequenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// @brief 1 - F1 between the pitch multisets of two chords.
///
/// Each note matches at most one note of equal pitch on the other side, so
/// true positives are the per-pitch minimum counts. 0 for equal multisets,
/// 1 when no pitch is shared.
Rational chordDistance(const Chord& transcribed, const Chord& ground_truth);

/// @brief Minimum-cost monotone alignment of two chord sequences.
///
/// cost(i, j) = min(cost(i-1, j-1) + d(i, j), cost(i, j-1) + gap, cost(i-1, j) + gap).
/// Ties prefer the match, then a gap in the transcription, then a gap in the
/// ground truth.
///
/// @throws EmptySequenceError if either sequence is empty.
AlignmentPath dtwAlign(const std::vector<Chord>& transcribed,
                       const std::vector<Chord>& ground_truth,
                       const Rational& gap_penalty = kDefaultGapPenalty);

/// Anchors at matched chord pairs sharing at least one pitch. An anchor not
/// strictly after the previous kept one in both coordinates is dropped.
AnchorSet extractAnchors(const AlignmentPath& path, const std::vector<Chord>& transcribed,
                         const std::vector<Chord>& ground_truth);

/// @brief Piecewise-linear map from transcription time to ground-truth time.
///
/// Between anchors the map interpolates; before the first and after the last
/// anchor it extends the first and last anchored segments. With one anchor it
/// translates onto the anchor and scales by the ratio of the spans; with none
/// it maps the transcription span onto the ground-truth span.
class TimeMap {
 public:
  TimeMap(const AnchorSet& anchors, const Span& transcription_span,
          const Span& ground_truth_span);

  Time operator()(const Time& t) const;

 private:
  std::vector<Anchor> anchors_;
  // Used with fewer than two anchors: t -> origin_.ground_truth + (t - origin_.transcribed) * scale_.
  Anchor origin_;
  Rational scale_;
};

/// @brief Move every time of the transcription onto the ground-truth timeline.
///
/// Notes, keys, meters, chord symbols and bar lines are mapped. When the
/// transcription has a time signature its groupings are generated on the
/// original timeline, mapped, and stored as explicit groupings.
Score remapTimes(const Score& transcription, const AnchorSet& anchors,
                 const Span& ground_truth_span);

struct AlignmentResult {
  AlignmentPath path;
  AnchorSet anchors;
  Score remapped;
};

/// @brief Full alignment pipeline: chord sequences, DTW, anchors, remapping.
/// @throws EmptySequenceError if either score has no notes.
AlignmentResult alignScores(const Score& transcription, const Score& ground_truth,
                            const Rational& gap_penalty = kDefaultGapPenalty);

}  // namespace mv2h

#endif  // MV2H_ALIGNMENT_H
