#include "sentinel/eval.hpp"

#include <fstream>

#include "json.hpp"
#include "sentinel/errors.hpp"

namespace sentinel {

using nlohmann::ordered_json;

std::string to_string(Detector detector) {
    switch (detector) {
        case Detector::DualSentinel:
            return "dualsentinel";
        case Detector::ConfGuard:
            return "confguard";
        case Detector::LullOnly:
            return "lullonly";
    }
    return "unknown";
}

Detector detector_from_string(const std::string& text) {
    if (text == "dualsentinel") {
        return Detector::DualSentinel;
    }
    if (text == "confguard") {
        return Detector::ConfGuard;
    }
    if (text == "lullonly") {
        return Detector::LullOnly;
    }
    throw DomainError("unknown detector: " + text);
}

EvalCorpus EvalCorpus::load(const std::filesystem::path& traces_path,
                            const std::filesystem::path& prompts_path) {
    return EvalCorpus{TraceBackend::from_file(traces_path),
                      read_prompts_file(prompts_path)};
}

EvalCorpus EvalCorpus::from_synth(SynthCorpus corpus) {
    return EvalCorpus{TraceBackend(std::move(corpus.traces)),
                      std::move(corpus.prompts)};
}

namespace {

// Single-pass detectors share the replay plumbing: consume the stream
// until the detector halts or the trace ends.
struct SinglePassOutcome {
    bool halted = false;
    std::size_t tokens = 0;
    std::optional<LullEvent> event;
};

SinglePassOutcome run_confguard_pass(StepStream& stream,
                                     const ConfGuardConfig& cfg) {
    ConfGuardMonitor monitor(cfg);
    SinglePassOutcome out;
    while (std::optional<TopKStep> step = stream.next()) {
        ++out.tokens;
        if (monitor.observe(*step) == StepDecision::Halt) {
            out.halted = true;
            break;
        }
    }
    return out;
}

SinglePassOutcome run_lull_pass(StepStream& stream, const MonitorConfig& cfg) {
    const PassResult pass = run_monitored_pass(stream, cfg, 0);
    return SinglePassOutcome{pass.event.has_value(), pass.tokens, pass.event};
}

}  // namespace

MetricsReport run_eval(EvalCorpus& corpus, Detector detector,
                       const EvalConfig& cfg) {
    if (corpus.prompts.empty()) {
        throw EmptyCorpusError("corpus has no labeled prompts");
    }
    cfg.monitor.validate();
    cfg.confguard.validate();

    if (detector == Detector::DualSentinel) {
        for (const PromptCase& pc : corpus.prompts) {
            const PromptBundle flipped = build_flipped_prompt(pc.prompt, cfg.flip);
            if (corpus.backend.find(prompt_hash(flipped)) == nullptr) {
                throw MissingFlippedTraceError("no flipped trace for case " +
                                               pc.id);
            }
        }
    }

    MetricsReport report;
    report.detector = detector;
    report.records.reserve(corpus.prompts.size());

    TraceBackend& backend = corpus.backend;

    for (const PromptCase& pc : corpus.prompts) {
        const GenerationTrace* original = backend.find(prompt_hash(pc.prompt));
        if (original == nullptr) {
            throw NoTraceForPromptError("no trace for case " + pc.id);
        }

        EvalRecord rec;
        rec.trace_id = pc.id;
        rec.label = pc.label;
        rec.wall_tokens_undefended = original->steps.size();

        switch (detector) {
            case Detector::DualSentinel: {
                rec.verdict = run_dual_check(pc.prompt, backend, cfg.monitor,
                                             cfg.flip,
                                             DualCheckOptions{cfg.topk});
                rec.positive = rec.verdict.outcome == Outcome::AttackConfirmed;
                rec.wall_tokens_defended = rec.verdict.tokens_generated_pass1 +
                                           rec.verdict.tokens_generated_pass2;
                break;
            }
            case Detector::ConfGuard: {
                GenerationRequest req;
                req.prompt = pc.prompt;
                req.topk = cfg.topk;
                auto stream = backend.open_stream(req);
                const SinglePassOutcome out =
                    run_confguard_pass(*stream, cfg.confguard);
                rec.positive = out.halted;
                rec.wall_tokens_defended = out.tokens;
                rec.verdict.outcome = out.halted ? Outcome::AttackConfirmed
                                                 : Outcome::CleanContinue;
                rec.verdict.tokens_generated_pass1 = out.tokens;
                break;
            }
            case Detector::LullOnly: {
                GenerationRequest req;
                req.prompt = pc.prompt;
                req.topk = cfg.topk;
                auto stream = backend.open_stream(req);
                const SinglePassOutcome out =
                    run_lull_pass(*stream, cfg.monitor);
                rec.positive = out.halted;
                rec.wall_tokens_defended = out.tokens;
                rec.verdict.outcome = out.halted ? Outcome::AttackConfirmed
                                                 : Outcome::CleanContinue;
                rec.verdict.first_pass_event = out.event;
                rec.verdict.tokens_generated_pass1 = out.tokens;
                break;
            }
        }

        if (pc.label == TraceLabel::Attack) {
            rec.positive ? ++report.counts.tp : ++report.counts.fn;
        } else {
            rec.positive ? ++report.counts.fp : ++report.counts.tn;
        }
        report.records.push_back(std::move(rec));
    }

    const auto& c = report.counts;
    if (c.tp + c.fn > 0) {
        report.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (c.fp + c.tn > 0) {
        report.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    }

    const bool has_benign = c.fp + c.tn > 0;
    const bool has_attack = c.tp + c.fn > 0;
    if (has_benign && has_attack) {
        const auto [ben, mal] = compute_atgr(report.records);
        report.atgr_benign = ben;
        report.atgr_malicious = mal;
    } else if (has_benign || has_attack) {
        // Single-class corpus: report the one ratio that exists.
        double def = 0.0, undef = 0.0;
        for (const EvalRecord& r : report.records) {
            def += static_cast<double>(r.wall_tokens_defended);
            undef += static_cast<double>(r.wall_tokens_undefended);
        }
        if (undef > 0.0) {
            (has_benign ? report.atgr_benign : report.atgr_malicious) =
                def / undef;
        }
    }
    return report;
}

std::pair<double, double> compute_atgr(std::span<const EvalRecord> records) {
    double ben_def = 0.0, ben_undef = 0.0;
    double mal_def = 0.0, mal_undef = 0.0;
    std::size_t ben_n = 0, mal_n = 0;
    for (const EvalRecord& r : records) {
        if (r.label == TraceLabel::Benign) {
            ben_def += static_cast<double>(r.wall_tokens_defended);
            ben_undef += static_cast<double>(r.wall_tokens_undefended);
            ++ben_n;
        } else {
            mal_def += static_cast<double>(r.wall_tokens_defended);
            mal_undef += static_cast<double>(r.wall_tokens_undefended);
            ++mal_n;
        }
    }
    if (ben_n == 0 || mal_n == 0) {
        throw EmptyClassError("both classes must be present for ATGR");
    }
    if (ben_undef <= 0.0 || mal_undef <= 0.0) {
        throw EmptyClassError("undefended token counts must be positive");
    }
    // Ratio of class means; the trace counts cancel.
    return {ben_def / ben_undef, mal_def / mal_undef};
}

namespace {

ordered_json event_to_json(const LullEvent& event) {
    ordered_json j;
    j["kind"] = event.kind == LullKind::Sustained ? "sustained" : "completed";
    j["flagged_step"] = event.flagged_step;
    j["window_mean"] = event.window_mean;
    j["run_length"] = event.run_length;
    return j;
}

LullEvent event_from_json(const ordered_json& j) {
    LullEvent event;
    event.kind = j.at("kind").get<std::string>() == "sustained"
                     ? LullKind::Sustained
                     : LullKind::Completed;
    event.flagged_step = j.at("flagged_step").get<std::size_t>();
    event.window_mean = j.at("window_mean").get<double>();
    event.run_length = j.at("run_length").get<std::size_t>();
    return event;
}

Outcome outcome_from_string(const std::string& text) {
    if (text == "attack_confirmed") {
        return Outcome::AttackConfirmed;
    }
    if (text == "benign_cleared") {
        return Outcome::BenignCleared;
    }
    if (text == "clean_continue") {
        return Outcome::CleanContinue;
    }
    throw DomainError("unknown outcome: " + text);
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
    ordered_json j;
    j["detector"] = to_string(report.detector);
    j["cost_proxy"] = "token_count";
    ordered_json counts;
    counts["tp"] = report.counts.tp;
    counts["fp"] = report.counts.fp;
    counts["tn"] = report.counts.tn;
    counts["fn"] = report.counts.fn;
    j["counts"] = std::move(counts);
    if (report.tpr) {
        j["tpr"] = *report.tpr;
    }
    if (report.fpr) {
        j["fpr"] = *report.fpr;
    }
    if (report.atgr_benign) {
        j["atgr_benign"] = *report.atgr_benign;
    }
    if (report.atgr_malicious) {
        j["atgr_malicious"] = *report.atgr_malicious;
    }
    ordered_json rows = ordered_json::array();
    for (const EvalRecord& r : report.records) {
        ordered_json row;
        row["trace_id"] = r.trace_id;
        row["label"] = to_string(r.label);
        row["positive"] = r.positive;
        row["outcome"] = to_string(r.verdict.outcome);
        row["tokens_pass1"] = r.verdict.tokens_generated_pass1;
        row["tokens_pass2"] = r.verdict.tokens_generated_pass2;
        row["tokens_defended"] = r.wall_tokens_defended;
        row["tokens_undefended"] = r.wall_tokens_undefended;
        if (r.verdict.first_pass_event) {
            row["first_pass_event"] = event_to_json(*r.verdict.first_pass_event);
        }
        if (r.verdict.second_pass_event) {
            row["second_pass_event"] =
                event_to_json(*r.verdict.second_pass_event);
        }
        rows.push_back(std::move(row));
    }
    j["records"] = std::move(rows);
    return j.dump(2);
}

MetricsReport report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    MetricsReport report;
    report.detector = detector_from_string(j.at("detector").get<std::string>());
    report.counts.tp = j.at("counts").at("tp").get<std::size_t>();
    report.counts.fp = j.at("counts").at("fp").get<std::size_t>();
    report.counts.tn = j.at("counts").at("tn").get<std::size_t>();
    report.counts.fn = j.at("counts").at("fn").get<std::size_t>();
    if (j.contains("tpr")) {
        report.tpr = j.at("tpr").get<double>();
    }
    if (j.contains("fpr")) {
        report.fpr = j.at("fpr").get<double>();
    }
    if (j.contains("atgr_benign")) {
        report.atgr_benign = j.at("atgr_benign").get<double>();
    }
    if (j.contains("atgr_malicious")) {
        report.atgr_malicious = j.at("atgr_malicious").get<double>();
    }
    for (const ordered_json& row : j.at("records")) {
        EvalRecord r;
        r.trace_id = row.at("trace_id").get<std::string>();
        r.label = trace_label_from_string(row.at("label").get<std::string>());
        r.positive = row.at("positive").get<bool>();
        r.verdict.outcome = outcome_from_string(row.at("outcome").get<std::string>());
        r.verdict.tokens_generated_pass1 =
            row.at("tokens_pass1").get<std::size_t>();
        r.verdict.tokens_generated_pass2 =
            row.at("tokens_pass2").get<std::size_t>();
        r.wall_tokens_defended = row.at("tokens_defended").get<std::size_t>();
        r.wall_tokens_undefended = row.at("tokens_undefended").get<std::size_t>();
        if (row.contains("first_pass_event")) {
            r.verdict.first_pass_event = event_from_json(row.at("first_pass_event"));
        }
        if (row.contains("second_pass_event")) {
            r.verdict.second_pass_event =
                event_from_json(row.at("second_pass_event"));
        }
        report.records.push_back(std::move(r));
    }
    return report;
}

void write_report_file(const std::filesystem::path& path,
                       const MetricsReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open report file for writing: " + path.string());
    }
    out << report_to_json(report) << '\n';
    if (!out.flush()) {
        throw Error("failed writing report file: " + path.string());
    }
}

void write_confusion_csv(const std::filesystem::path& path,
                         const MetricsReport& report) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open CSV file for writing: " + path.string());
    }
    out << "tp,fp,tn,fn\n"
        << report.counts.tp << ',' << report.counts.fp << ','
        << report.counts.tn << ',' << report.counts.fn << '\n';
    if (!out.flush()) {
        throw Error("failed writing CSV file: " + path.string());
    }
}

}  // namespace sentinel
