#include "oracles.h"

#include <algorithm>
#include <functional>
#include <optional>

namespace mv2h::testing {

std::size_t maxPitchMatching(const std::vector<int>& lhs, const std::vector<int>& rhs) {
  std::vector<std::optional<std::size_t>> owner(rhs.size());
  std::function<bool(std::size_t, std::vector<bool>&)> augment =
      [&](std::size_t left, std::vector<bool>& seen) {
        for (std::size_t right = 0; right < rhs.size(); ++right) {
          if (lhs[left] != rhs[right] || seen[right]) continue;
          seen[right] = true;
          if (!owner[right] || augment(*owner[right], seen)) {
            owner[right] = left;
            return true;
          }
        }
        return false;
      };
  std::size_t matched = 0;
  for (std::size_t left = 0; left < lhs.size(); ++left) {
    std::vector<bool> seen(rhs.size(), false);
    if (augment(left, seen)) ++matched;
  }
  return matched;
}

Rational oracleChordDistance(const std::vector<int>& transcribed,
                             const std::vector<int>& ground_truth) {
  Rational tp(static_cast<unsigned long>(maxPitchMatching(transcribed, ground_truth)));
  Rational fp = Rational(static_cast<unsigned long>(transcribed.size())) - tp;
  Rational fn = Rational(static_cast<unsigned long>(ground_truth.size())) - tp;
  Rational precision = tp / (tp + fp);
  Rational recall = tp / (tp + fn);
  if (precision + recall == 0) return 1;
  return 1 - 2 * precision * recall / (precision + recall);
}

Rational bruteForceAlignmentCost(const std::vector<std::vector<int>>& transcribed,
                                 const std::vector<std::vector<int>>& ground_truth,
                                 const Rational& gap_penalty) {
  std::optional<Rational> best;
  std::function<void(std::size_t, std::size_t, Rational)> walk = [&](std::size_t i, std::size_t j,
                                                                     Rational cost) {
    if (i == transcribed.size() && j == ground_truth.size()) {
      if (!best || cost < *best) best = cost;
      return;
    }
    if (i < transcribed.size() && j < ground_truth.size()) {
      walk(i + 1, j + 1, cost + oracleChordDistance(transcribed[i], ground_truth[j]));
    }
    if (i < transcribed.size()) walk(i + 1, j, cost + gap_penalty);
    if (j < ground_truth.size()) walk(i, j + 1, cost + gap_penalty);
  };
  walk(0, 0, Rational(0));
  return *best;
}

std::size_t bruteForceMaxNotePairs(const std::vector<Note>& transcribed,
                                   const std::vector<Note>& ground_truth,
                                   const Time& tolerance) {
  std::vector<bool> used(ground_truth.size(), false);
  std::function<std::size_t(std::size_t)> search = [&](std::size_t k) -> std::size_t {
    if (k == transcribed.size()) return 0;
    std::size_t best = search(k + 1);
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (used[g] || ground_truth[g].pitch != transcribed[k].pitch) continue;
      Time gap = ground_truth[g].onset - transcribed[k].onset;
      if (gap < 0) gap = -gap;
      if (gap > tolerance) continue;
      used[g] = true;
      best = std::max(best, 1 + search(k + 1));
      used[g] = false;
    }
    return best;
  };
  return search(0);
}

namespace {

int uniform(std::mt19937& rng, int low, int high) {
  return std::uniform_int_distribution<int>(low, high)(rng);
}

}  // namespace

Score randomScore(std::mt19937& rng, const RandomScoreOptions& options) {
  constexpr int kGrid = 250;
  static const char* const kQualities[] = {"", "maj", "min", "7", "dim", "min7"};
  static const int kDenominators[] = {2, 4, 8};

  ScoreContent content;
  content.voice_count = uniform(rng, 1, options.max_voices);
  int last_offset = 0;
  for (int voice = 0; voice < content.voice_count; ++voice) {
    int t = voice == 0 ? 0 : uniform(rng, 0, 4) * kGrid;
    int count = uniform(rng, voice == 0 ? 1 : 0, options.max_notes_per_voice);
    for (int n = 0; n < count; ++n) {
      int duration = uniform(rng, 1, 4) * kGrid;
      content.notes.push_back(Note{Pitch{uniform(rng, 48, 72)}, Time(t), Time(t + duration), voice});
      last_offset = std::max(last_offset, t + duration);
      t += duration + (uniform(rng, 0, 3) == 0 ? kGrid : 0);
    }
  }
  // Voice 0 always starts at 0, so every signature at 0 precedes the first note.
  auto grid_time = [&] { return Time(uniform(rng, 1, std::max(1, last_offset / kGrid - 1)) * kGrid); };

  content.keys.push_back(KeySignature{uniform(rng, 0, 11),
                                      uniform(rng, 0, 1) ? Mode::kMajor : Mode::kMinor, Time(0)});
  if (options.key_changes && last_offset > 2 * kGrid) {
    for (int k = uniform(rng, 0, 2); k > 0; --k) {
      Time start = grid_time();
      bool taken = std::any_of(content.keys.begin(), content.keys.end(),
                               [&](const KeySignature& key) { return key.start == start; });
      if (!taken) {
        content.keys.push_back(KeySignature{uniform(rng, 0, 11),
                                            uniform(rng, 0, 1) ? Mode::kMajor : Mode::kMinor, start});
      }
    }
  }

  auto random_meter = [&](Time start) {
    return TimeSignature{uniform(rng, 1, 12), kDenominators[uniform(rng, 0, 2)], std::move(start)};
  };
  content.meters.push_back(random_meter(Time(0)));
  if (options.meter_changes && last_offset > 2 * kGrid) {
    for (int k = uniform(rng, 0, 2); k > 0; --k) {
      Time start = grid_time();
      bool taken = std::any_of(content.meters.begin(), content.meters.end(),
                               [&](const TimeSignature& meter) { return meter.start == start; });
      if (!taken) content.meters.push_back(random_meter(start));
    }
  }

  if (options.chord_symbols) {
    for (int k = uniform(rng, 0, 4); k > 0; --k) {
      Time start = k == 1 ? Time(0) : grid_time();
      bool taken = std::any_of(content.chord_symbols.begin(), content.chord_symbols.end(),
                               [&](const ChordSymbol& symbol) { return symbol.start == start; });
      if (!taken) {
        content.chord_symbols.push_back(
            ChordSymbol{ChordLabel{uniform(rng, 0, 11), kQualities[uniform(rng, 0, 5)]}, start});
      }
    }
  }

  if (options.bar_lines) {
    for (int t = 0; t <= last_offset + 4000; t += 4000) content.bar_lines.push_back(Time(t));
  }
  return Score(std::move(content));
}

Chord makeChord(const std::vector<int>& pitches, const Time& onset) {
  Chord chord{onset, {}};
  for (int pitch : pitches) chord.notes.push_back(Note{Pitch{pitch}, onset, onset + 1000, 0});
  return chord;
}

}  // namespace mv2h::testing
