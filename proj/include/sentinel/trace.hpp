#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sentinel/entropy.hpp"

namespace sentinel {

enum class TraceLabel { Benign, Attack };

std::string to_string(TraceLabel label);
TraceLabel trace_label_from_string(const std::string& text);

/// One recorded decoding step: emitted token text plus the raw top-k
/// probabilities (linear scale, non-increasing).
struct TraceStep {
    std::string token;
    std::vector<double> probs;
    bool eos = false;
};

/// A full recorded generation, keyed by the content hash of the prompt
/// that produced it.
struct GenerationTrace {
    std::string prompt_hash;
    TraceLabel label = TraceLabel::Benign;
    std::vector<TraceStep> steps;
};

/// Expands a recorded step into the runtime TopKStep. Alternative slots
/// beyond the emitted token get placeholder names; only the probabilities
/// matter downstream.
TopKStep to_topk_step(const TraceStep& step, std::size_t step_index);

/// Entropies of all steps of a trace via the batched kernel.
std::vector<EntropySample> trace_entropies(const GenerationTrace& trace);

// Trace files are newline-delimited JSON records:
//   {"prompt_hash": "<16 hex>", "label": "benign"|"attack",
//    "steps": [{"t": "<token>", "p": [..], "eos": false}, ...]}

/// Parses a whole trace file. Throws ParseError carrying the 1-based line
/// number of the offending record. Blank lines are ignored.
std::vector<GenerationTrace> read_trace_file(const std::filesystem::path& path);

std::vector<GenerationTrace> read_traces(std::istream& in);

void write_trace_file(const std::filesystem::path& path,
                      const std::vector<GenerationTrace>& traces);

void write_traces(std::ostream& out, const std::vector<GenerationTrace>& traces);

}  // namespace sentinel
