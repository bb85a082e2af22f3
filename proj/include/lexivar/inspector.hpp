#pragma once

#include <cstddef>

#include "lexivar/results.hpp"

namespace lexivar {

/// Execution knobs that never change results, so they are not echoed into
/// the document.
struct RunOptions {
  /// Worker shards for tokenization and counting; 0 = available parallelism.
  std::size_t threads = 0;
  /// Write kPinnedTimestamp instead of the wall clock.
  bool pin_timestamp = false;
};

/// Resolves the effective worker count: explicit value, else LEXIVAR_THREADS,
/// else hardware concurrency.
std::size_t resolve_thread_count(std::size_t requested);

/// load -> select -> tokenize/preprocess/unitize -> assign tuples -> count ->
/// score. Errors from each stage are rethrown with the stage name prefixed.
ResultsDocument run_inspection(const InspectionConfig& config, const RunOptions& options = {});

}  // namespace lexivar
