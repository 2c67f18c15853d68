// Helpers shared by the score parsers.

#ifndef MV2H_SRC_INGEST_INTERNAL_H
#define MV2H_SRC_INGEST_INTERNAL_H

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "mv2h/ingest.h"

namespace mv2h::detail {

/// Move a leading key or meter that starts after the first note back to it.
template <typename Event>
inline void pullFirstToOnset(std::vector<Event>& events, const std::vector<Note>& notes,
                      const char* what, std::vector<ParseDiagnostic>& diagnostics,
                      std::string_view file_name) {
  if (events.empty() || notes.empty()) return;
  auto first = std::min_element(events.begin(), events.end(),
                                [](const Event& a, const Event& b) { return a.start < b.start; });
  Time first_onset = notes.front().onset;
  for (const Note& note : notes) first_onset = std::min(first_onset, note.onset);
  if (first->start > first_onset) {
    bool collides = std::any_of(events.begin(), events.end(),
                                [&](const Event& e) { return e.start == first_onset; });
    if (!collides) {
      diagnostics.push_back({Severity::kWarning, std::string(file_name), "",
                             std::string("first ") + what + " starts after the first note; moved to " +
                                 formatExact(first_onset)});
      first->start = first_onset;
    }
  }
}

}  // namespace mv2h::detail

#endif  // MV2H_SRC_INGEST_INTERNAL_H
