#include "mv2h/runner.h"

#include <CLI11.hpp>

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "mv2h/ingest.h"

namespace mv2h {

MatchMode EvaluationOptions::matchMode() const {
  if (alignment == AlignmentKind::kAutoAligned) return MatchMode::autoAligned();
  return MatchMode::preAligned(onset_tolerance.value_or(Time(50)),
                               grouping_tolerance.value_or(Time(50)));
}

EvaluationReport evaluatePair(const Score& transcription, const Score& ground_truth,
                              const EvaluationOptions& options) {
  if (options.alignment == AlignmentKind::kAutoAligned && !transcription.empty() &&
      !ground_truth.empty()) {
    AlignmentResult aligned = alignScores(transcription, ground_truth, options.gap_penalty);
    return evaluate(aligned.remapped, ground_truth, options.matchMode());
  }
  return evaluate(transcription, ground_truth, options.matchMode());
}

namespace {

struct PairJob {
  std::string ground_truth_path;
  std::string transcription_path;
};

struct PairOutcome {
  std::optional<EvaluationReport> report;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

PairOutcome evaluateFiles(const PairJob& job, const EvaluationOptions& options) {
  PairOutcome outcome;
  ParseResult ground_truth = parseScoreFile(job.ground_truth_path);
  ParseResult transcription = parseScoreFile(job.transcription_path);
  for (const ParseResult* parsed : {&ground_truth, &transcription}) {
    for (const ParseDiagnostic& diagnostic : parsed->diagnostics) {
      auto& sink = diagnostic.severity == Severity::kError ? outcome.errors : outcome.warnings;
      sink.push_back(diagnostic.toString());
    }
  }
  if (!ground_truth.ok() || !transcription.ok()) return outcome;

  try {
    outcome.report = evaluatePair(*transcription.score, *ground_truth.score, options);
  } catch (const std::exception& e) {
    outcome.errors.push_back(job.transcription_path + ": error: " + e.what());
  }
  return outcome;
}

std::optional<std::vector<PairJob>> readManifest(const std::string& path, std::ostream& err) {
  std::ifstream input(path);
  if (!input) {
    err << path << ": error: cannot open manifest\n";
    return std::nullopt;
  }
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& entry) {
    std::filesystem::path p(entry);
    return (p.is_absolute() ? p : base / p).string();
  };

  std::vector<PairJob> jobs;
  std::string line;
  int line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    std::istringstream tokens(line);
    std::vector<std::string> fields;
    for (std::string field; tokens >> field;) fields.push_back(field);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 2) {
      err << path << ": line " << line_number
          << ": error: expected '<ground-truth> <transcription>'\n";
      return std::nullopt;
    }
    jobs.push_back({resolve(fields[0]), resolve(fields[1])});
  }
  return jobs;
}

void reportDiagnostics(const PairOutcome& outcome, int verbosity, std::ostream& err) {
  for (const std::string& error : outcome.errors) err << error << '\n';
  if (verbosity > 0) {
    for (const std::string& warning : outcome.warnings) err << warning << '\n';
  }
  if (outcome.report) {
    for (const std::string& note : outcome.report->diagnostics) err << "note: " << note << '\n';
  }
}

void writePairReport(const PairJob& job, const EvaluationReport& report, const RunConfig& config,
                     bool batch, std::ostream& out) {
  if (!batch) {
    out << emitReport(report, config.format, config.exact);
    return;
  }
  if (config.format == OutputFormat::kJson) {
    nlohmann::ordered_json line;
    line["ground_truth"] = job.ground_truth_path;
    line["transcription"] = job.transcription_path;
    line.update(reportToJson(report, config.exact));
    out << line.dump() << '\n';
  } else {
    out << "== " << job.ground_truth_path << ' ' << job.transcription_path << '\n'
        << emitReport(report, config.format, config.exact);
  }
  out.flush();
}

void writeMean(const std::vector<EvaluationReport>& reports, const RunConfig& config,
               std::ostream& out) {
  EvaluationReport mean;
  for (const EvaluationReport& report : reports) {
    mean.multi_pitch += report.multi_pitch;
    mean.voice += report.voice;
    mean.meter += report.meter;
    mean.value += report.value;
    mean.harmony += report.harmony;
    mean.mv2h += report.mv2h;
  }
  if (!reports.empty()) {
    const Rational count(static_cast<unsigned long>(reports.size()));
    for (Rational* value : {&mean.multi_pitch, &mean.voice, &mean.meter, &mean.value,
                            &mean.harmony, &mean.mv2h}) {
      *value /= count;
    }
  }
  if (config.format == OutputFormat::kJson) {
    nlohmann::ordered_json line;
    line["pairs"] = reports.size();
    line["mean"] = reportToJson(mean, config.exact);
    out << line.dump() << '\n';
  } else {
    out << "== Mean over " << reports.size() << " pairs\n"
        << emitReport(mean, config.format, config.exact);
  }
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const bool batch = !config.batch_path.empty();
  if (batch && (!config.ground_truth_path.empty() || !config.transcription_path.empty())) {
    err << "error: --batch cannot be combined with --gt/--tr\n";
    return kExitUsage;
  }
  if (!batch && (config.ground_truth_path.empty() || config.transcription_path.empty())) {
    err << "error: both --gt and --tr are required (or --batch)\n";
    return kExitUsage;
  }
  const EvaluationOptions& options = config.evaluation;
  if (options.alignment == AlignmentKind::kAutoAligned &&
      (options.onset_tolerance || options.grouping_tolerance)) {
    err << "error: tolerances are fixed at 0 with --align auto; use --align pre\n";
    return kExitUsage;
  }
  for (const auto& tolerance : {options.onset_tolerance, options.grouping_tolerance}) {
    if (tolerance && *tolerance < 0) {
      err << "error: tolerances must be non-negative\n";
      return kExitUsage;
    }
  }
  if (options.gap_penalty < 0) {
    err << "error: gap penalty must be non-negative\n";
    return kExitUsage;
  }

  std::vector<PairJob> jobs;
  if (batch) {
    auto manifest = readManifest(config.batch_path, err);
    if (!manifest) return kExitParse;
    jobs = std::move(*manifest);
  } else {
    jobs.push_back({config.ground_truth_path, config.transcription_path});
  }

  unsigned workers = config.jobs != 0 ? config.jobs : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);

  // Evaluate up to `workers` pairs ahead; print strictly in manifest order.
  std::deque<std::future<PairOutcome>> pending;
  std::size_t next = 0;
  auto launch = [&] {
    while (next < jobs.size() && pending.size() < workers) {
      const PairJob& job = jobs[next++];
      pending.push_back(std::async(std::launch::async, evaluateFiles, job, options));
    }
  };

  int status = kExitSuccess;
  std::vector<EvaluationReport> reports;
  launch();
  for (std::size_t index = 0; index < jobs.size(); ++index) {
    PairOutcome outcome = pending.front().get();
    pending.pop_front();
    launch();

    reportDiagnostics(outcome, config.verbosity, err);
    if (!outcome.report) {
      status = kExitParse;
      continue;
    }
    writePairReport(jobs[index], *outcome.report, config, batch, out);
    reports.push_back(std::move(*outcome.report));
  }
  if (batch) writeMean(reports, config, out);
  return status;
}

int runCommandLine(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate a music transcription against a ground-truth score with MV2H."};
  app.name("mv2h");

  RunConfig config;
  std::string align = "auto";
  std::string format = "text";
  std::string gap_penalty;
  std::string onset_tolerance;
  std::string grouping_tolerance;
  int verbosity = 0;

  app.add_option("--gt", config.ground_truth_path, "Ground-truth score (.musicxml/.xml or text)");
  app.add_option("--tr", config.transcription_path, "Transcribed score (.musicxml/.xml or text)");
  app.add_option("--batch", config.batch_path, "Manifest of '<gt> <tr>' lines");
  app.add_option("--align", align, "Alignment: auto (DTW) or pre (already time-aligned)")
      ->check(CLI::IsMember({"auto", "pre"}));
  app.add_option("--gap-penalty", gap_penalty, "DTW insertion/deletion cost (default 3/5)");
  app.add_option("--onset-tolerance", onset_tolerance, "Onset tolerance in ms (pre only)");
  app.add_option("--grouping-tolerance", grouping_tolerance, "Grouping tolerance in ms (pre only)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--exact", config.exact, "Print exact rationals p/q");
  app.add_option("-j,--jobs", config.jobs, "Concurrent batch evaluations (default: all cores)");
  app.add_flag("-v,--verbose", verbosity, "Print parse warnings");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  config.verbosity = verbosity;
  config.format = format == "json" ? OutputFormat::kJson : OutputFormat::kText;
  config.evaluation.alignment =
      align == "pre" ? AlignmentKind::kPreAligned : AlignmentKind::kAutoAligned;
  try {
    if (!gap_penalty.empty()) config.evaluation.gap_penalty = parseRational(gap_penalty);
    if (!onset_tolerance.empty()) config.evaluation.onset_tolerance = parseRational(onset_tolerance);
    if (!grouping_tolerance.empty()) {
      config.evaluation.grouping_tolerance = parseRational(grouping_tolerance);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(config, out, err);
}

}  // namespace mv2h
