#pragma once

#include <map>
#include <string>
#include <vector>

#include "ctopen/registry.hpp"
#include "ctopen/search.hpp"

namespace ctopen {

enum class DeconStatus {
    excluded_no_results_anywhere,
    excluded_pre_cutoff_llm,
    excluded_no_post_cutoff,
    excluded_pre_cutoff_web_index,
    excluded_pre_cutoff_database,
    accepted
};

std::string to_string(DeconStatus s);
DeconStatus decon_status_from_string(const std::string& s);

// Per-trial outcome of the filtering run, with every computed evidence set
// retained regardless of status.
struct DeconDecision {
    std::string nct_id;
    DeconStatus status = DeconStatus::accepted;
    std::map<std::string, std::vector<EvidenceDocument>> evidence;  // U_before, U_after,
                                                                    // U_brave, U_db
    Date cutoff;

    nlohmann::json to_json() const;
    static DeconDecision from_json(const nlohmann::json& j);
};

struct DeferredTrial {
    std::string nct_id;
    std::string error;
};

struct DeconReport {
    Date cutoff;
    std::map<std::string, std::size_t> status_counts;
    std::vector<std::string> undated_documents;
    std::vector<DeferredTrial> deferred;
    std::vector<SearchWarning> warnings;
    std::string prompt_version;
    std::string config_digest;

    nlohmann::json to_json() const;
};

struct ScreenOutcome {
    std::vector<TrialRecord> survivors;
    std::vector<DeconDecision> removed;  // excluded_no_results_anywhere
    std::vector<DeferredTrial> deferred;
};

struct DeconRun {
    std::vector<TrialRecord> accepted;
    std::vector<DeconDecision> decisions;
    DeconReport report;
};

// Quick screening pass: one unbounded single-document probe per trial;
// trials with no results anywhere are removed. A trial whose probe cannot
// complete is deferred, never silently kept or dropped.
ScreenOutcome initial_screen(const std::vector<TrialRecord>& pool, SearchEngine& engine,
                             int concurrency);

// Stages in order, short-circuiting: LLM before-cutoff searches on both
// backends; LLM after-cutoff searches; web-index before-cutoff with full
// fetch/extract/date/verify; literature databases before-cutoff. Throws
// BackendError when a stage cannot complete, leaving the trial undecided.
DeconDecision decontaminate(const TrialRecord& trial, const Date& cutoff, SearchEngine& engine);

// Screen then decontaminate the surviving pool; deterministic under replay
// fixtures. Failed trials are deferred and surfaced in the run report.
DeconRun run_decontamination(const std::vector<TrialRecord>& pool, const Date& cutoff,
                             SearchEngine& engine, int concurrency);

}  // namespace ctopen
