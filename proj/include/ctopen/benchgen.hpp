#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctopen/decon.hpp"
#include "ctopen/registry.hpp"
#include "ctopen/search.hpp"
#include "ctopen/verification.hpp"

namespace ctopen {

// A released artifact whose inputs violate an integrity precondition.
class IntegrityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Three-month challenge period. The cutoff (time-stamp) is one day before
// the window begins; [start, end) bounds the usable evidence dates.
struct ChallengeWindow {
    Date start;
    Date end;
    Date cutoff;

    static ChallengeWindow from_dates(const Date& start, const Date& end);
    DateWindow evidence_window() const { return DateWindow::between(start, end); }

    nlohmann::json to_json() const;
    static ChallengeWindow from_json(const nlohmann::json& j);
};

enum class QuestionClass { superiority, comparative_effect, endpoint_trial, endpoint_any_arm };

std::string to_string(QuestionClass c);
QuestionClass question_class_from_string(const std::string& s);

// Outcome-measure-level question tuple. Two-arm classes carry both arm
// labels; endpoint classes carry none.
struct BenchmarkQuestion {
    std::string question_id;
    std::string nct_id;
    QuestionClass question_class = QuestionClass::endpoint_trial;
    int outcome_measure_index = 0;
    std::optional<std::string> focal_arm;
    std::optional<std::string> comparator_arm;
    std::vector<std::string> options;
    Date cutoff;

    nlohmann::json to_json() const;
    static BenchmarkQuestion from_json(const nlohmann::json& j);
};

enum class AnswerVerification { verified, discarded };

struct BenchmarkAnswer {
    std::string question_id;
    int label = -1;  // option index
    std::vector<std::string> supporting_documents;
    AnswerVerification verification = AnswerVerification::discarded;

    nlohmann::json to_json() const;
    static BenchmarkAnswer from_json(const nlohmann::json& j);
};

std::string question_id_for(const std::string& nct_id, int measure_index, QuestionClass cls,
                            const std::string& focal_arm, const std::string& comparator_arm);

// Pure function of the protocol: per outcome measure, the two endpoint
// subtypes; per (treatment, comparator) arm pairing, a superiority question
// against placebo-type comparators and a three-way comparative-effect
// question against active comparators. Uses no result data.
std::vector<BenchmarkQuestion> generate_questions(const TrialRecord& trial, const Date& cutoff);

// Same, restricted to the given outcome-measure indices.
std::vector<BenchmarkQuestion> generate_questions_for_measures(
    const TrialRecord& trial, const Date& cutoff, const std::vector<int>& measure_indices);

struct PoolExclusionReport {
    std::size_t input_trials = 0;
    std::size_t ineligible_enrollment = 0;
    std::size_t ineligible_intervention = 0;
    std::size_t ineligible_allocation = 0;
    std::size_t ineligible_design = 0;
    std::size_t excluded_completion_date = 0;
    std::size_t flagged_missing_completion_date = 0;
    std::size_t excluded_pre_window_results = 0;
    std::size_t deferred_screen_failures = 0;
    std::size_t dropped_measure_pairs_timeframe = 0;
    std::size_t flagged_unparseable_timeframe = 0;
    std::size_t surviving_trials = 0;
    std::size_t surviving_measure_pairs = 0;
    std::map<std::string, std::size_t> question_counts;

    nlohmann::json to_json() const;
};

struct CandidatePool {
    std::vector<TrialRecord> eligible;
    std::vector<BenchmarkQuestion> questions;
    PoolExclusionReport report;
};

// Candidate question set for a future challenge: eligibility (enrollment
// >= 50, drug intervention, randomized, controlled), the strict 31-day
// completion-date rule, a pre-window public-results screen, and the
// outcome-measure time-frame filter, then question generation over the
// surviving measures.
CandidatePool build_candidate_pool(const std::vector<TrialRecord>& trials,
                                   const ChallengeWindow& window, SearchEngine& engine,
                                   int concurrency);

// Indexed evidence rendering shared by the answer prompts.
std::string render_evidence_list(const std::vector<EvidenceDocument>& docs);

// Binary classes: a proposal pass selects the option, a verification pass
// confirms it with yes/no; unsupported answers are discarded.
BenchmarkAnswer propose_and_verify_binary_answer(const BenchmarkQuestion& question,
                                                 const TrialRecord& trial,
                                                 const std::vector<EvidenceDocument>& evidence,
                                                 const JudgeClient& judge);

// Comparative effect: three-way selection with significance guidance in the
// prompt; a no-selection reply discards the question.
BenchmarkAnswer answer_comparative(const BenchmarkQuestion& question, const TrialRecord& trial,
                                   const std::vector<EvidenceDocument>& evidence,
                                   const JudgeClient& judge);

struct AnswerRun {
    std::vector<BenchmarkAnswer> answers;  // verified and discarded
    std::vector<std::pair<std::string, std::string>> deferred;  // question_id, error
};

AnswerRun generate_answers(const std::vector<BenchmarkQuestion>& questions,
                           const std::map<std::string, TrialRecord>& trials_by_id,
                           const std::map<std::string, std::vector<EvidenceDocument>>& evidence,
                           const JudgeClient& judge, int concurrency);

// In-window verified results documents for one accepted trial (web index
// plus literature databases over the challenge window).
std::vector<EvidenceDocument> gather_window_evidence(const TrialRecord& trial,
                                                     const ChallengeWindow& window,
                                                     SearchEngine& engine);

struct BenchmarkStats {
    std::map<std::string, std::size_t> per_class;
    std::size_t unique_trials = 0;
    std::size_t total_questions = 0;

    nlohmann::json to_json() const;
};

struct BenchmarkArtifact {
    int format_version = 1;
    ChallengeWindow window;
    std::vector<BenchmarkQuestion> questions;  // released (answered) questions
    std::vector<BenchmarkAnswer> answers;      // verified only
    BenchmarkStats stats;
};

// Joins verified answers to their questions and embeds the statistics
// block. Aborts with IntegrityError when any released question references a
// trial without an accepted decontamination decision.
BenchmarkArtifact assemble_benchmark(const std::vector<DeconDecision>& decisions,
                                     const std::vector<BenchmarkQuestion>& questions,
                                     const std::vector<BenchmarkAnswer>& answers,
                                     const ChallengeWindow& window);

// Line-delimited artifact: one header record, then question records, then
// answer records. include_answers = false writes the submission-facing pool
// file with the identical schema minus answers.
void write_benchmark_file(const BenchmarkArtifact& artifact, const std::string& path,
                          bool include_answers = true);
BenchmarkArtifact read_benchmark_file(const std::string& path);

}  // namespace ctopen
