#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctopen/benchgen.hpp"

namespace ctopen {

// Submission file problems found at load time (unknown question ids, option
// index out of range); the message lists every offending id.
class SubmissionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Submission {
    std::string participant_id;
    std::string submitted_at;  // ISO 8601 timestamp; lexicographic order is time order
    std::map<std::string, int> predictions;

    static Submission load(const std::string& path, const BenchmarkArtifact& benchmark);
    void write(const std::string& path) const;
};

struct ClassScore {
    double macro_f1 = 0.0;
    double balanced_accuracy = 0.0;
    std::size_t n_questions = 0;
    double coverage = 0.0;
};

struct ScoreReport {
    std::map<std::string, ClassScore> per_class;
    nlohmann::json to_json() const;
};

// Balanced accuracy is the mean per-true-class recall; macro-F1 the
// unweighted mean of per-option F1 (zero-denominator convention: 0).
// Unanswered questions score as incorrect and lower coverage.
ScoreReport score(const Submission& submission, const BenchmarkArtifact& benchmark);

enum class Metric { balanced_accuracy, macro_f1 };

std::string to_string(Metric m);

struct BootstrapComparison {
    bool defined = false;  // false with fewer than 2 trials in the class
    double lo = 0.0;
    double hi = 0.0;
    bool significant = false;  // central 95% interval excludes 0
};

// Resamples trials with replacement, then questions within each sampled
// trial, and takes the percentile interval of per-resample metric
// differences (a - b). Per-resample derived seeds make parallel and serial
// runs bit-identical.
BootstrapComparison hierarchical_bootstrap_compare(const Submission& sub_a,
                                                   const Submission& sub_b,
                                                   const BenchmarkArtifact& benchmark,
                                                   QuestionClass question_class, Metric metric,
                                                   int n_resamples, std::uint64_t seed,
                                                   int threads = 1);

struct LeaderboardRow {
    std::string participant_id;
    std::string submitted_at;
    double headline = 0.0;
    ScoreReport report;
};

// Ranked by the configured headline metric for one class; ties broken by
// earlier submission timestamp.
std::vector<LeaderboardRow> leaderboard(const std::vector<Submission>& submissions,
                                        const BenchmarkArtifact& benchmark,
                                        QuestionClass headline_class, Metric headline_metric);

std::string render_leaderboard_text(const std::vector<LeaderboardRow>& rows,
                                    QuestionClass headline_class, Metric headline_metric);
nlohmann::json leaderboard_to_json(const std::vector<LeaderboardRow>& rows,
                                   QuestionClass headline_class, Metric headline_metric);

}  // namespace ctopen
