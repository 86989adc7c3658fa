#include "ctopen/decon.hpp"

#include <algorithm>
#include <tuple>

#include "ctopen/concurrency.hpp"

namespace ctopen {

namespace {

const char* kEvidenceLabels[] = {"U_before", "U_after", "U_brave", "U_db"};

std::vector<EvidenceDocument> merge_by_url(std::vector<EvidenceDocument> a,
                                           std::vector<EvidenceDocument> b) {
    for (auto& doc : b) {
        bool present = std::any_of(a.begin(), a.end(),
                                   [&](const EvidenceDocument& d) { return d.url == doc.url; });
        if (!present) a.push_back(std::move(doc));
    }
    return a;
}

}  // namespace

std::string to_string(DeconStatus s) {
    switch (s) {
        case DeconStatus::excluded_no_results_anywhere: return "excluded_no_results_anywhere";
        case DeconStatus::excluded_pre_cutoff_llm: return "excluded_pre_cutoff_llm";
        case DeconStatus::excluded_no_post_cutoff: return "excluded_no_post_cutoff";
        case DeconStatus::excluded_pre_cutoff_web_index: return "excluded_pre_cutoff_web_index";
        case DeconStatus::excluded_pre_cutoff_database: return "excluded_pre_cutoff_database";
        case DeconStatus::accepted: return "accepted";
    }
    return "accepted";
}

DeconStatus decon_status_from_string(const std::string& s) {
    if (s == "excluded_no_results_anywhere") return DeconStatus::excluded_no_results_anywhere;
    if (s == "excluded_pre_cutoff_llm") return DeconStatus::excluded_pre_cutoff_llm;
    if (s == "excluded_no_post_cutoff") return DeconStatus::excluded_no_post_cutoff;
    if (s == "excluded_pre_cutoff_web_index") return DeconStatus::excluded_pre_cutoff_web_index;
    if (s == "excluded_pre_cutoff_database") return DeconStatus::excluded_pre_cutoff_database;
    return DeconStatus::accepted;
}

nlohmann::json DeconDecision::to_json() const {
    nlohmann::json j;
    j["nct_id"] = nct_id;
    j["status"] = ctopen::to_string(status);
    j["cutoff"] = cutoff.to_iso();
    j["evidence"] = nlohmann::json::object();
    for (const char* label : kEvidenceLabels) {
        nlohmann::json docs = nlohmann::json::array();
        auto it = evidence.find(label);
        if (it != evidence.end()) {
            for (const auto& doc : it->second) docs.push_back(doc.to_json());
        }
        j["evidence"][label] = std::move(docs);
    }
    return j;
}

DeconDecision DeconDecision::from_json(const nlohmann::json& j) {
    DeconDecision d;
    d.nct_id = j.value("nct_id", "");
    d.status = decon_status_from_string(j.value("status", "accepted"));
    if (j.contains("cutoff")) {
        if (auto c = parse_iso_date(j["cutoff"].get<std::string>())) d.cutoff = *c;
    }
    if (j.contains("evidence")) {
        for (const char* label : kEvidenceLabels) {
            if (!j["evidence"].contains(label)) continue;
            std::vector<EvidenceDocument> docs;
            for (const auto& doc : j["evidence"][label])
                docs.push_back(EvidenceDocument::from_json(doc));
            d.evidence[label] = std::move(docs);
        }
    }
    return d;
}

nlohmann::json DeconReport::to_json() const {
    nlohmann::json j;
    j["cutoff"] = cutoff.to_iso();
    j["status_counts"] = status_counts;
    j["undated_documents"] = undated_documents;
    j["deferred"] = nlohmann::json::array();
    for (const auto& d : deferred)
        j["deferred"].push_back({{"nct_id", d.nct_id}, {"error", d.error}});
    j["warnings"] = nlohmann::json::array();
    for (const auto& w : warnings)
        j["warnings"].push_back({{"backend", w.backend_id}, {"message", w.message}});
    j["prompt_version"] = prompt_version;
    j["config_digest"] = config_digest;
    return j;
}

ScreenOutcome initial_screen(const std::vector<TrialRecord>& pool, SearchEngine& engine,
                             int concurrency) {
    ScreenOutcome outcome;
    enum class Verdict { survived, removed, deferred };
    std::vector<Verdict> verdicts(pool.size(), Verdict::deferred);
    std::vector<std::string> errors(pool.size());

    parallel_for(pool.size(), concurrency, [&](std::size_t i) {
        try {
            auto docs = engine.search(pool[i], DateWindow::all(), SearchMode::llm_search_a, 1);
            verdicts[i] = docs.empty() ? Verdict::removed : Verdict::survived;
        } catch (const BackendError& e) {
            // unresolved trials are surfaced, never silently kept
            verdicts[i] = Verdict::deferred;
            errors[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < pool.size(); ++i) {
        switch (verdicts[i]) {
            case Verdict::survived:
                outcome.survivors.push_back(pool[i]);
                break;
            case Verdict::removed: {
                DeconDecision d;
                d.nct_id = pool[i].nct_id;
                d.status = DeconStatus::excluded_no_results_anywhere;
                outcome.removed.push_back(std::move(d));
                break;
            }
            case Verdict::deferred:
                outcome.deferred.push_back({pool[i].nct_id, errors[i]});
                break;
        }
    }
    return outcome;
}

DeconDecision decontaminate(const TrialRecord& trial, const Date& cutoff, SearchEngine& engine) {
    DeconDecision decision;
    decision.nct_id = trial.nct_id;
    decision.cutoff = cutoff;
    for (const char* label : kEvidenceLabels) decision.evidence[label] = {};

    const DateWindow before = DateWindow::before(cutoff);
    const DateWindow after = DateWindow::from(cutoff);

    // (1) grounded-LLM searches before the cutoff, both backends
    decision.evidence["U_before"] =
        merge_by_url(engine.search(trial, before, SearchMode::llm_search_a, std::nullopt),
                     engine.search(trial, before, SearchMode::llm_search_b, std::nullopt));
    if (!decision.evidence["U_before"].empty()) {
        decision.status = DeconStatus::excluded_pre_cutoff_llm;
        return decision;
    }

    // (2) after the cutoff; no usable post-cutoff results means the
    // screening hit was a false positive
    decision.evidence["U_after"] =
        merge_by_url(engine.search(trial, after, SearchMode::llm_search_a, std::nullopt),
                     engine.search(trial, after, SearchMode::llm_search_b, std::nullopt));
    if (decision.evidence["U_after"].empty()) {
        decision.status = DeconStatus::excluded_no_post_cutoff;
        return decision;
    }

    // (3) web-index search with full fetch/extract/date/verify membership
    decision.evidence["U_brave"] =
        engine.search(trial, before, SearchMode::web_index, std::nullopt);
    if (!decision.evidence["U_brave"].empty()) {
        decision.status = DeconStatus::excluded_pre_cutoff_web_index;
        return decision;
    }

    // (4) literature databases; only reached when the web index was clean
    decision.evidence["U_db"] =
        engine.search(trial, before, SearchMode::literature_database, std::nullopt);
    if (!decision.evidence["U_db"].empty()) {
        decision.status = DeconStatus::excluded_pre_cutoff_database;
        return decision;
    }

    decision.status = DeconStatus::accepted;
    return decision;
}

DeconRun run_decontamination(const std::vector<TrialRecord>& pool, const Date& cutoff,
                             SearchEngine& engine, int concurrency) {
    DeconRun run;
    run.report.cutoff = cutoff;

    ScreenOutcome screened = initial_screen(pool, engine, concurrency);
    run.decisions = screened.removed;
    for (auto& d : run.decisions) d.cutoff = cutoff;
    run.report.deferred = screened.deferred;

    std::vector<std::optional<DeconDecision>> slots(screened.survivors.size());
    std::vector<std::string> errors(screened.survivors.size());
    parallel_for(screened.survivors.size(), concurrency, [&](std::size_t i) {
        try {
            slots[i] = decontaminate(screened.survivors[i], cutoff, engine);
        } catch (const BackendError& e) {
            errors[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < screened.survivors.size(); ++i) {
        if (slots[i]) {
            if (slots[i]->status == DeconStatus::accepted)
                run.accepted.push_back(screened.survivors[i]);
            run.decisions.push_back(std::move(*slots[i]));
        } else {
            // a contamination check that could not complete must never
            // produce an accepted trial
            run.report.deferred.push_back({screened.survivors[i].nct_id, errors[i]});
        }
    }

    for (const auto& d : run.decisions) ++run.report.status_counts[to_string(d.status)];
    // audit lists are filled from worker threads; sort for stable reports
    run.report.undated_documents = engine.undated_urls();
    std::sort(run.report.undated_documents.begin(), run.report.undated_documents.end());
    run.report.warnings = engine.warnings();
    std::sort(run.report.warnings.begin(), run.report.warnings.end(),
              [](const SearchWarning& a, const SearchWarning& b) {
                  return std::tie(a.backend_id, a.message) < std::tie(b.backend_id, b.message);
              });
    run.report.prompt_version = engine.judge().prompt_version();
    return run;
}

}  // namespace ctopen
