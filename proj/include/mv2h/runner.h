// Command-line driver: load score pairs, align, evaluate and report.

#ifndef MV2H_RUNNER_H
#define MV2H_RUNNER_H

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mv2h/alignment.h"
#include "mv2h/metrics.h"
#include "mv2h/report.h"

namespace mv2h {

enum ExitCode : int { kExitSuccess = 0, kExitUsage = 1, kExitParse = 2 };

struct EvaluationOptions {
  AlignmentKind alignment = AlignmentKind::kAutoAligned;
  Rational gap_penalty = kDefaultGapPenalty;
  /// Pre-aligned mode only; 50 ms when unset.
  std::optional<Time> onset_tolerance;
  std::optional<Time> grouping_tolerance;

  MatchMode matchMode() const;
};

/// Evaluate one pair. Auto alignment remaps the transcription onto the ground
/// truth first (skipped when the transcription has no notes).
EvaluationReport evaluatePair(const Score& transcription, const Score& ground_truth,
                              const EvaluationOptions& options);

struct RunConfig {
  std::string ground_truth_path;
  std::string transcription_path;
  /// Two whitespace-separated paths per line: ground truth, transcription.
  /// Relative paths resolve against the manifest's directory.
  std::string batch_path;
  EvaluationOptions evaluation;
  OutputFormat format = OutputFormat::kText;
  bool exact = false;
  int verbosity = 0;
  unsigned jobs = 0;  // 0: hardware concurrency
};

/// Run one evaluation or a batch. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parse command-line arguments (without the program name) and run.
int runCommandLine(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mv2h

#endif  // MV2H_RUNNER_H
