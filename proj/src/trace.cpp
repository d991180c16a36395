#include "sentinel/trace.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/kernels.hpp"

namespace sentinel {

using nlohmann::ordered_json;

std::string to_string(TraceLabel label) {
    return label == TraceLabel::Benign ? "benign" : "attack";
}

TraceLabel trace_label_from_string(const std::string& text) {
    if (text == "benign") {
        return TraceLabel::Benign;
    }
    if (text == "attack") {
        return TraceLabel::Attack;
    }
    throw DomainError("unknown trace label: " + text);
}

TopKStep to_topk_step(const TraceStep& step, std::size_t step_index) {
    TopKStep out;
    out.token = step.token;
    out.is_eos = step.eos;
    out.step_index = step_index;
    out.topk.reserve(step.probs.size());
    for (std::size_t i = 0; i < step.probs.size(); ++i) {
        // Slot 0 carries the emitted token; the rest are placeholders since
        // only their probabilities matter downstream.
        std::string name = i == 0 ? step.token : "alt_" + std::to_string(i);
        out.topk.push_back(TokenProb{std::move(name), step.probs[i]});
    }
    return out;
}

std::vector<EntropySample> trace_entropies(const GenerationTrace& trace) {
    std::vector<EntropySample> out;
    out.reserve(trace.steps.size());

    // Batch consecutive steps that share the same k so the kernel can run
    // over contiguous row blocks.
    std::size_t start = 0;
    std::vector<double> block;
    std::vector<double> entropies;
    while (start < trace.steps.size()) {
        const std::size_t k = trace.steps[start].probs.size();
        std::size_t end = start;
        while (end < trace.steps.size() && trace.steps[end].probs.size() == k) {
            ++end;
        }
        const std::size_t rows = end - start;
        block.resize(rows * k);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto& probs = trace.steps[start + r].probs;
            std::copy(probs.begin(), probs.end(), block.begin() + r * k);
        }
        entropies.resize(rows);
        kernels::entropy_rows(block.data(), rows, k, entropies.data());
        for (std::size_t r = 0; r < rows; ++r) {
            const TraceStep& s = trace.steps[start + r];
            out.push_back(EntropySample{entropies[r], start + r, s.eos});
        }
        start = end;
    }
    return out;
}

namespace {

GenerationTrace parse_record(const ordered_json& j, std::size_t line) {
    GenerationTrace trace;
    try {
        trace.prompt_hash = j.at("prompt_hash").get<std::string>();
        trace.label = trace_label_from_string(j.at("label").get<std::string>());
        for (const auto& js : j.at("steps")) {
            TraceStep step;
            step.token = js.at("t").get<std::string>();
            step.probs = js.at("p").get<std::vector<double>>();
            step.eos = js.value("eos", false);
            if (step.probs.empty()) {
                throw DomainError("step has no probabilities");
            }
            trace.steps.push_back(std::move(step));
        }
    } catch (const ordered_json::exception& e) {
        throw ParseError(e.what(), line);
    } catch (const Error& e) {
        throw ParseError(e.what(), line);
    }
    return trace;
}

}  // namespace

std::vector<GenerationTrace> read_traces(std::istream& in) {
    std::vector<GenerationTrace> traces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("malformed JSON record", line_no);
        }
        traces.push_back(parse_record(j, line_no));
    }
    return traces;
}

std::vector<GenerationTrace> read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open trace file: " + path.string());
    }
    return read_traces(in);
}

void write_traces(std::ostream& out, const std::vector<GenerationTrace>& traces) {
    for (const GenerationTrace& trace : traces) {
        ordered_json j;
        j["prompt_hash"] = trace.prompt_hash;
        j["label"] = to_string(trace.label);
        ordered_json steps = ordered_json::array();
        for (const TraceStep& step : trace.steps) {
            ordered_json js;
            js["t"] = step.token;
            js["p"] = step.probs;
            js["eos"] = step.eos;
            steps.push_back(std::move(js));
        }
        j["steps"] = std::move(steps);
        out << j.dump() << '\n';
    }
}

void write_trace_file(const std::filesystem::path& path,
                      const std::vector<GenerationTrace>& traces) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open trace file for writing: " + path.string());
    }
    write_traces(out, traces);
    if (!out.flush()) {
        throw Error("failed writing trace file: " + path.string());
    }
}

}  // namespace sentinel
