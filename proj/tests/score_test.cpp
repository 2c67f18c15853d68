// Tests for the score model: validation, chord sequences, metrical groupings
// and continuous key sections.

#include "mv2h/score.h"

#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace mv2h {
namespace {

constexpr int kC4 = 60;
constexpr int kE4 = 64;
constexpr int kG4 = 67;

Note makeNote(int pitch, int onset, int offset, int voice = 0) {
  return Note{Pitch{pitch}, Time(onset), Time(offset), voice};
}

Score makeScore(std::vector<Note> notes, std::vector<TimeSignature> meters = {},
                std::vector<KeySignature> keys = {}, int voices = 1) {
  ScoreContent content;
  content.notes = std::move(notes);
  content.voice_count = voices;
  content.meters = std::move(meters);
  content.keys = std::move(keys);
  return Score(std::move(content));
}

std::vector<Grouping> ofLevel(const std::vector<Grouping>& groupings, GroupingLevel level) {
  std::vector<Grouping> out;
  for (const Grouping& g : groupings) {
    if (g.level == level) out.push_back(g);
  }
  std::sort(out.begin(), out.end(),
            [](const Grouping& a, const Grouping& b) { return a.start < b.start; });
  return out;
}

/// Intervals of `level` inside [start, end), which must tile it exactly.
void expectTiles(const std::vector<Grouping>& groupings, GroupingLevel level, const Time& start,
                 const Time& end) {
  std::vector<Grouping> inside;
  for (const Grouping& g : ofLevel(groupings, level)) {
    if (g.start >= start && g.end <= end) inside.push_back(g);
  }
  ASSERT_FALSE(inside.empty());
  EXPECT_EQ(inside.front().start, start);
  EXPECT_EQ(inside.back().end, end);
  for (std::size_t i = 1; i < inside.size(); ++i) EXPECT_EQ(inside[i].start, inside[i - 1].end);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

TEST(ScoreTest, RejectsInvalidContent) {
  EXPECT_THROW(makeScore({makeNote(128, 0, 100)}), InvalidScoreError);
  EXPECT_THROW(makeScore({makeNote(kC4, 100, 100)}), InvalidScoreError);
  EXPECT_THROW(makeScore({makeNote(kC4, 100, 50)}), InvalidScoreError);
  EXPECT_THROW(makeScore({makeNote(kC4, 0, 100, 1)}), InvalidScoreError);
  EXPECT_THROW(makeScore({makeNote(kC4, 0, 100)}, {TimeSignature{4, 3, Time(0)}}),
               InvalidScoreError);
  EXPECT_THROW(makeScore({makeNote(kC4, 0, 100)}, {TimeSignature{0, 4, Time(0)}}),
               InvalidScoreError);
  EXPECT_THROW(makeScore({makeNote(kC4, 0, 100)}, {},
                         {KeySignature{12, Mode::kMajor, Time(0)}}),
               InvalidScoreError);
  // Two keys at one time.
  EXPECT_THROW(makeScore({makeNote(kC4, 0, 100)}, {},
                         {KeySignature{0, Mode::kMajor, Time(0)},
                          KeySignature{2, Mode::kMajor, Time(0)}}),
               InvalidScoreError);
  // First time signature after the first note.
  EXPECT_THROW(makeScore({makeNote(kC4, 0, 100)}, {TimeSignature{4, 4, Time(10)}}),
               InvalidScoreError);
}

TEST(ScoreTest, NormalizesOrderAndComputesSpan) {
  Score score = makeScore({makeNote(kG4, 1000, 3000), makeNote(kE4, 0, 500),
                           makeNote(kC4, 0, 1000)},
                          {TimeSignature{3, 4, Time(0)}},
                          {KeySignature{2, Mode::kMajor, Time(500)},
                           KeySignature{0, Mode::kMajor, Time(0)}});
  ASSERT_EQ(score.notes().size(), 3u);
  EXPECT_EQ(score.notes()[0].pitch.midi, kC4);
  EXPECT_EQ(score.notes()[1].pitch.midi, kE4);
  EXPECT_EQ(score.notes()[2].pitch.midi, kG4);
  EXPECT_EQ(score.keys().front().tonic, 0);
  EXPECT_EQ(score.span(), (Span{Time(0), Time(3000)}));
}

TEST(ScoreTest, EmptyScoreHasZeroSpan) {
  Score score = makeScore({}, {TimeSignature{4, 4, Time(0)}});
  EXPECT_TRUE(score.empty());
  EXPECT_EQ(score.span().length(), 0);
}

TEST(TimeSignatureTest, SimpleAndCompoundBeatRules) {
  TimeSignature common{4, 4, Time(0)};
  EXPECT_FALSE(common.isCompound());
  EXPECT_EQ(common.beatLength(), 1000);
  EXPECT_EQ(common.subBeatLength(), 500);
  EXPECT_EQ(common.barLength(), 4000);

  TimeSignature waltz{3, 8, Time(0)};
  EXPECT_FALSE(waltz.isCompound());
  EXPECT_EQ(waltz.beatsPerBar(), 3);
  EXPECT_EQ(waltz.beatLength(), 500);

  TimeSignature jig{6, 8, Time(0)};
  EXPECT_TRUE(jig.isCompound());
  EXPECT_EQ(jig.beatsPerBar(), 2);
  EXPECT_EQ(jig.beatLength(), 1500);
  EXPECT_EQ(jig.subBeatLength(), 500);

  TimeSignature twelve{12, 8, Time(0)};
  EXPECT_EQ(twelve.beatsPerBar(), 4);
  EXPECT_EQ(twelve.barLength(), 6000);
}

// ---------------------------------------------------------------------------
// buildChordSequence
// ---------------------------------------------------------------------------

TEST(ChordSequenceTest, GroupsNotesByEqualOnset) {
  Score score = makeScore({makeNote(kC4, 0, 1000), makeNote(kE4, 0, 1000),
                           makeNote(kG4, 1000, 2000)});
  auto chords = buildChordSequence(score);
  ASSERT_EQ(chords.size(), 2u);
  EXPECT_EQ(chords[0].onset, 0);
  ASSERT_EQ(chords[0].notes.size(), 2u);
  EXPECT_EQ(chords[0].notes[0].pitch.midi, kC4);
  EXPECT_EQ(chords[0].notes[1].pitch.midi, kE4);
  EXPECT_EQ(chords[1].onset, 1000);
  ASSERT_EQ(chords[1].notes.size(), 1u);
  EXPECT_EQ(chords[1].notes[0].pitch.midi, kG4);
}

TEST(ChordSequenceTest, NotesInDifferentVoicesShareAChord) {
  Score score = makeScore({makeNote(kC4, 0, 1000, 0), makeNote(kC4, 0, 500, 1)}, {}, {}, 2);
  auto chords = buildChordSequence(score);
  ASSERT_EQ(chords.size(), 1u);
  EXPECT_EQ(chords[0].notes.size(), 2u);
}

TEST(ChordSequenceTest, EmptyScoreGivesEmptySequence) {
  EXPECT_TRUE(buildChordSequence(makeScore({})).empty());
}

TEST(ChordSequenceTest, PartitionsNotesWithStrictlyIncreasingOnsets) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Score score = testing::randomScore(rng);
    auto chords = buildChordSequence(score);
    std::size_t total = 0;
    for (std::size_t i = 0; i < chords.size(); ++i) {
      total += chords[i].notes.size();
      EXPECT_FALSE(chords[i].notes.empty());
      for (const Note& note : chords[i].notes) EXPECT_EQ(note.onset, chords[i].onset);
      if (i > 0) EXPECT_LT(chords[i - 1].onset, chords[i].onset);
    }
    EXPECT_EQ(total, score.notes().size());
  }
}

// ---------------------------------------------------------------------------
// generateGroupings
// ---------------------------------------------------------------------------

TEST(GroupingTest, OneBarOfFourFour) {
  Score score = makeScore({makeNote(kC4, 0, 4000)}, {TimeSignature{4, 4, Time(0)}});
  auto groupings = generateGroupings(score);

  // Enumerated by hand: 4 quarter beats, each split in two.
  std::vector<Grouping> expected = {{GroupingLevel::kBar, Time(0), Time(4000)}};
  for (int beat = 0; beat < 4; ++beat) {
    expected.push_back({GroupingLevel::kBeat, Time(beat * 1000), Time(beat * 1000 + 1000)});
    expected.push_back({GroupingLevel::kSubBeat, Time(beat * 1000), Time(beat * 1000 + 500)});
    expected.push_back({GroupingLevel::kSubBeat, Time(beat * 1000 + 500), Time(beat * 1000 + 1000)});
  }
  EXPECT_EQ(groupings, expected);
}

TEST(GroupingTest, OneBarOfSixEight) {
  Score score = makeScore({makeNote(kC4, 0, 3000)}, {TimeSignature{6, 8, Time(0)}});
  auto groupings = generateGroupings(score);
  auto bars = ofLevel(groupings, GroupingLevel::kBar);
  auto beats = ofLevel(groupings, GroupingLevel::kBeat);
  auto subs = ofLevel(groupings, GroupingLevel::kSubBeat);
  ASSERT_EQ(bars.size(), 1u);
  EXPECT_EQ(bars[0], (Grouping{GroupingLevel::kBar, Time(0), Time(3000)}));
  ASSERT_EQ(beats.size(), 2u);
  EXPECT_EQ(beats[0], (Grouping{GroupingLevel::kBeat, Time(0), Time(1500)}));
  EXPECT_EQ(beats[1], (Grouping{GroupingLevel::kBeat, Time(1500), Time(3000)}));
  ASSERT_EQ(subs.size(), 6u);
  for (int k = 0; k < 6; ++k) {
    EXPECT_EQ(subs[k], (Grouping{GroupingLevel::kSubBeat, Time(500 * k), Time(500 * k + 500)}));
  }
}

TEST(GroupingTest, BarsCoverTheLastNote) {
  Score score = makeScore({makeNote(kC4, 0, 4001)}, {TimeSignature{4, 4, Time(0)}});
  auto bars = ofLevel(generateGroupings(score), GroupingLevel::kBar);
  ASSERT_EQ(bars.size(), 2u);
  EXPECT_EQ(bars[1].end, 8000);
}

TEST(GroupingTest, TimeSignatureChangeStartsANewBar) {
  Score score = makeScore({makeNote(kC4, 0, 7000)},
                          {TimeSignature{4, 4, Time(0)}, TimeSignature{3, 4, Time(4000)}});
  auto groupings = generateGroupings(score);
  auto bars = ofLevel(groupings, GroupingLevel::kBar);
  ASSERT_EQ(bars.size(), 2u);
  EXPECT_EQ(bars[0], (Grouping{GroupingLevel::kBar, Time(0), Time(4000)}));
  EXPECT_EQ(bars[1], (Grouping{GroupingLevel::kBar, Time(4000), Time(7000)}));
  EXPECT_EQ(ofLevel(groupings, GroupingLevel::kBeat).size(), 7u);
  for (const Grouping& g : groupings) {
    EXPECT_FALSE(g.start < 4000 && g.end > 4000) << "grouping straddles the change";
  }
}

TEST(GroupingTest, MidBarChangeClipsTheBar) {
  Score score = makeScore({makeNote(kC4, 0, 9000)},
                          {TimeSignature{4, 4, Time(0)}, TimeSignature{3, 4, Time(6000)}});
  auto groupings = generateGroupings(score);
  auto bars = ofLevel(groupings, GroupingLevel::kBar);
  ASSERT_EQ(bars.size(), 3u);
  EXPECT_EQ(bars[1], (Grouping{GroupingLevel::kBar, Time(4000), Time(6000)}));
  EXPECT_EQ(bars[2], (Grouping{GroupingLevel::kBar, Time(6000), Time(9000)}));
  for (const Grouping& g : groupings) EXPECT_FALSE(g.start < 6000 && g.end > 6000);
}

TEST(GroupingTest, PickupBarCountsBeatsFromItsEnd) {
  ScoreContent content;
  content.notes = {makeNote(kC4, 0, 1500), makeNote(kE4, 1500, 5500)};
  content.voice_count = 1;
  content.meters = {TimeSignature{4, 4, Time(0)}};
  content.bar_lines = {Time(0), Time(1500), Time(5500)};
  auto groupings = generateGroupings(Score(std::move(content)));

  auto bars = ofLevel(groupings, GroupingLevel::kBar);
  ASSERT_EQ(bars.size(), 2u);
  EXPECT_EQ(bars[0].end, 1500);
  auto beats = ofLevel(groupings, GroupingLevel::kBeat);
  ASSERT_EQ(beats.size(), 6u);
  EXPECT_EQ(beats[0], (Grouping{GroupingLevel::kBeat, Time(0), Time(500)}));
  EXPECT_EQ(beats[1], (Grouping{GroupingLevel::kBeat, Time(500), Time(1500)}));
  EXPECT_EQ(beats[2], (Grouping{GroupingLevel::kBeat, Time(1500), Time(2500)}));
  auto subs = ofLevel(groupings, GroupingLevel::kSubBeat);
  EXPECT_EQ(subs[0], (Grouping{GroupingLevel::kSubBeat, Time(0), Time(500)}));
  EXPECT_EQ(subs[1], (Grouping{GroupingLevel::kSubBeat, Time(500), Time(1000)}));
}

TEST(GroupingTest, ExplicitGroupingsAreReturnedVerbatim) {
  ScoreContent content;
  content.notes = {makeNote(kC4, 0, 100)};
  content.voice_count = 1;
  content.groupings = {{GroupingLevel::kBar, Time(0), Time(7, 3)}};
  Score score(std::move(content));
  EXPECT_EQ(generateGroupings(score), score.explicitGroupings());
}

TEST(GroupingTest, MissingTimeSignatureIsAnError) {
  EXPECT_THROW(generateGroupings(makeScore({makeNote(kC4, 0, 100)})), MissingMeterError);
}

TEST(GroupingTest, BeatsTileBarsAndSubBeatsTileBeats) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    testing::RandomScoreOptions options;
    options.bar_lines = trial % 3 == 0;
    Score score = testing::randomScore(rng, options);
    auto groupings = generateGroupings(score);
    auto bars = ofLevel(groupings, GroupingLevel::kBar);
    ASSERT_FALSE(bars.empty());
    for (std::size_t i = 1; i < bars.size(); ++i) EXPECT_EQ(bars[i].start, bars[i - 1].end);
    EXPECT_GE(bars.back().end, score.span().last_offset);
    for (const Grouping& bar : bars) expectTiles(groupings, GroupingLevel::kBeat, bar.start, bar.end);
    for (const Grouping& beat : ofLevel(groupings, GroupingLevel::kBeat)) {
      expectTiles(groupings, GroupingLevel::kSubBeat, beat.start, beat.end);
    }
    for (const TimeSignature& meter : score.meters()) {
      for (const Grouping& g : groupings) {
        EXPECT_FALSE(g.start < meter.start && g.end > meter.start);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// continuousKeySections
// ---------------------------------------------------------------------------

constexpr int kD = 2;
constexpr int kG = 7;

TEST(KeySectionTest, SplitsAtKeyChangesOfBothScores) {
  Score ground_truth = makeScore({makeNote(kC4, 0, 4000)}, {},
                                 {KeySignature{kD, Mode::kMajor, Time(0)},
                                  KeySignature{kG, Mode::kMinor, Time(2000)}});
  Score transcription = makeScore({makeNote(kC4, 0, 4000)}, {},
                                  {KeySignature{kD, Mode::kMajor, Time(0)},
                                   KeySignature{kG, Mode::kMajor, Time(1000)}});
  auto sections = continuousKeySections(transcription, ground_truth);
  ASSERT_EQ(sections.size(), 3u);
  EXPECT_EQ(sections[0].start, 0);
  EXPECT_EQ(sections[0].end, 1000);
  EXPECT_EQ(sections[1].end, 2000);
  EXPECT_EQ(sections[2].end, 4000);
  EXPECT_EQ(sections[1].transcription_key.tonic, kG);
  EXPECT_EQ(sections[1].ground_truth_key.tonic, kD);
  EXPECT_EQ(sections[2].ground_truth_key.mode, Mode::kMinor);
}

TEST(KeySectionTest, IdenticalSingleKeyGivesOneSection) {
  std::vector<KeySignature> keys = {KeySignature{kD, Mode::kMajor, Time(0)}};
  Score score = makeScore({makeNote(kC4, 0, 4000)}, {}, keys);
  auto sections = continuousKeySections(score, score);
  ASSERT_EQ(sections.size(), 1u);
  EXPECT_EQ(sections[0].start, 0);
  EXPECT_EQ(sections[0].end, 4000);
}

TEST(KeySectionTest, CoincidingChangesGiveOneBoundary) {
  Score ground_truth = makeScore({makeNote(kC4, 0, 4000)}, {},
                                 {KeySignature{kD, Mode::kMajor, Time(0)},
                                  KeySignature{kG, Mode::kMinor, Time(2000)}});
  Score transcription = makeScore({makeNote(kC4, 0, 4000)}, {},
                                  {KeySignature{kD, Mode::kMajor, Time(0)},
                                   KeySignature{kG, Mode::kMajor, Time(2000)}});
  EXPECT_EQ(continuousKeySections(transcription, ground_truth).size(), 2u);
}

TEST(KeySectionTest, SectionsTileTheGroundTruthSpan) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Score transcription = testing::randomScore(rng);
    Score ground_truth = testing::randomScore(rng);
    auto sections = continuousKeySections(transcription, ground_truth);
    ASSERT_FALSE(sections.empty());
    EXPECT_EQ(sections.front().start, ground_truth.span().first_onset);
    EXPECT_EQ(sections.back().end, ground_truth.span().last_offset);
    for (std::size_t i = 0; i < sections.size(); ++i) {
      EXPECT_LT(sections[i].start, sections[i].end);
      if (i > 0) EXPECT_EQ(sections[i].start, sections[i - 1].end);
      for (const auto* keys : {&transcription.keys(), &ground_truth.keys()}) {
        for (const KeySignature& key : *keys) {
          EXPECT_FALSE(key.start > sections[i].start && key.start < sections[i].end);
        }
      }
    }
  }
}

TEST(KeySectionTest, RequiresKeysInBothScores) {
  Score keyless = makeScore({makeNote(kC4, 0, 100)});
  EXPECT_THROW(continuousKeySections(keyless, keyless), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Chord labels
// ---------------------------------------------------------------------------

TEST(ChordLabelTest, ParsesCommonSpellings) {
  EXPECT_EQ(parseChordLabel("C"), (ChordLabel{0, ""}));
  EXPECT_EQ(parseChordLabel("F#m"), (ChordLabel{6, "min"}));
  EXPECT_EQ(parseChordLabel("Bb:min7"), (ChordLabel{10, "min7"}));
  EXPECT_EQ(parseChordLabel("G7"), (ChordLabel{7, "7"}));
  EXPECT_EQ(parseChordLabel("Cb"), (ChordLabel{11, ""}));
  EXPECT_EQ(parseChordLabel("D:maj/F#"), (ChordLabel{2, "maj"}));
  EXPECT_EQ(parseChordLabel("Ebmajor-seventh"), (ChordLabel{3, "maj7"}));
  EXPECT_FALSE(parseChordLabel("H"));
  EXPECT_FALSE(parseChordLabel(""));
  EXPECT_FALSE(parseChordLabel("C:"));
}

TEST(ChordLabelTest, RootOnlyLabelsCompareByRoot) {
  ChordLabel c_root{0, ""};
  EXPECT_TRUE(c_root.matches(ChordLabel{0, "min"}));
  EXPECT_TRUE((ChordLabel{0, "maj"}).matches(c_root));
  EXPECT_FALSE((ChordLabel{0, "maj"}).matches(ChordLabel{0, "min"}));
  EXPECT_FALSE(c_root.matches(ChordLabel{1, ""}));
}

TEST(ChordLabelTest, FormatThenParseIsIdentity) {
  for (int root = 0; root < 12; ++root) {
    for (const char* quality : {"", "maj", "min", "7", "hdim7", "9sus4"}) {
      ChordLabel label{root, quality};
      EXPECT_EQ(parseChordLabel(formatChordLabel(label)), label) << formatChordLabel(label);
    }
  }
}

}  // namespace
}  // namespace mv2h
