#pragma once

#include <filesystem>
#include <iosfwd>

#include "byzlink/manifest.hpp"
#include "byzlink/protocol.hpp"

namespace byzlink {

/// Trace file layout: one JSON object per line. The first line is a meta
/// record embedding the full simulation config (graph inline) and the run
/// manifest; then one record per iteration; the last line is a summary.
void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace, const RunManifest& manifest);
void write_trace_jsonl(const std::filesystem::path& path, const ExecutionTrace& trace,
                       const RunManifest& manifest);

struct LoadedTrace {
    ExecutionTrace trace;
    RunManifest manifest;
};

LoadedTrace read_trace_jsonl(std::istream& in);
LoadedTrace read_trace_jsonl(const std::filesystem::path& path);

}  // namespace byzlink
