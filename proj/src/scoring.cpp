#include "ctopen/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ctopen/concurrency.hpp"

namespace ctopen {

namespace {

constexpr int kNoAnswer = -1;

struct ScoredQuestion {
    int truth;
    int answer;  // kNoAnswer when unanswered
    int arity;
};

// metric core shared by score() and the bootstrap; operates on any multiset
// of scored questions
struct MetricAccumulator {
    std::map<int, std::int64_t> truth_counts;
    std::map<int, std::int64_t> correct_counts;          // per truth label
    std::map<std::pair<int, int>, std::int64_t> joint;   // (truth, answer), answered only
    std::int64_t answered = 0;
    std::int64_t total = 0;

    void add(const ScoredQuestion& q) {
        ++total;
        ++truth_counts[q.truth];
        if (q.answer != kNoAnswer) {
            ++answered;
            ++joint[{q.truth, q.answer}];
        }
        if (q.answer == q.truth) ++correct_counts[q.truth];
    }

    double balanced_accuracy() const {
        if (truth_counts.empty()) return 0.0;
        double sum = 0.0;
        for (const auto& [label, count] : truth_counts) {
            auto it = correct_counts.find(label);
            double correct = it == correct_counts.end() ? 0.0 : static_cast<double>(it->second);
            sum += correct / static_cast<double>(count);
        }
        return sum / static_cast<double>(truth_counts.size());
    }

    double macro_f1() const {
        // options present in the truth or in the answered predictions
        std::set<int> labels;
        for (const auto& [label, count] : truth_counts) labels.insert(label);
        for (const auto& [pair, count] : joint) labels.insert(pair.second);
        if (labels.empty()) return 0.0;

        double sum = 0.0;
        for (int label : labels) {
            std::int64_t tp = 0, fp = 0, fn = 0;
            for (const auto& [pair, count] : joint) {
                if (pair.second == label) {
                    if (pair.first == label) tp += count;
                    else fp += count;
                }
            }
            auto truth_it = truth_counts.find(label);
            std::int64_t truth_total = truth_it == truth_counts.end() ? 0 : truth_it->second;
            fn = truth_total - tp;  // wrong answers and unanswered both count

            double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
            double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
            double f1 = (precision + recall) > 0.0
                            ? 2.0 * precision * recall / (precision + recall)
                            : 0.0;
            sum += f1;
        }
        return sum / static_cast<double>(labels.size());
    }

    double metric(Metric m) const {
        return m == Metric::balanced_accuracy ? balanced_accuracy() : macro_f1();
    }
};

std::map<std::string, int> truth_labels(const BenchmarkArtifact& benchmark) {
    std::map<std::string, int> truth;
    for (const auto& a : benchmark.answers) truth[a.question_id] = a.label;
    return truth;
}

ScoredQuestion scored_question(const BenchmarkQuestion& q, int truth,
                               const Submission& submission) {
    auto it = submission.predictions.find(q.question_id);
    int answer = it == submission.predictions.end() ? kNoAnswer : it->second;
    return {truth, answer, static_cast<int>(q.options.size())};
}

// splitmix64 finalizer for per-resample seed derivation
std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// std::mt19937_64 is fully specified by the standard; the modulo reduction
// keeps draws identical across platforms (std::uniform_int_distribution is
// not portable)
struct PortableRng {
    std::mt19937_64 engine;
    explicit PortableRng(std::uint64_t seed) : engine(seed) {}
    std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(engine() % n); }
};

}  // namespace

std::string to_string(Metric m) {
    return m == Metric::balanced_accuracy ? "balanced_accuracy" : "macro_f1";
}

Submission Submission::load(const std::string& path, const BenchmarkArtifact& benchmark) {
    std::ifstream in(path);
    if (!in) throw SubmissionError("submission file not found: " + path);

    std::map<std::string, int> arity;
    for (const auto& q : benchmark.questions)
        arity[q.question_id] = static_cast<int>(q.options.size());

    Submission s;
    std::vector<std::string> unknown;
    std::vector<std::string> out_of_range;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (!have_header && j.contains("participant_id")) {
            s.participant_id = j.value("participant_id", "");
            s.submitted_at = j.value("submitted_at", "");
            have_header = true;
            continue;
        }
        std::string id = j.value("question_id", "");
        int answer = j.value("answer", -1);
        auto it = arity.find(id);
        if (it == arity.end()) {
            unknown.push_back(id);
            continue;
        }
        if (answer < 0 || answer >= it->second) {
            out_of_range.push_back(id);
            continue;
        }
        s.predictions[id] = answer;
    }

    if (!unknown.empty() || !out_of_range.empty()) {
        std::ostringstream msg;
        msg << "submission rejected:";
        if (!unknown.empty()) {
            msg << " unknown question ids:";
            for (const auto& id : unknown) msg << " " << id;
            msg << ";";
        }
        if (!out_of_range.empty()) {
            msg << " option index out of range for:";
            for (const auto& id : out_of_range) msg << " " << id;
        }
        throw SubmissionError(msg.str());
    }
    return s;
}

void Submission::write(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    nlohmann::json header;
    header["participant_id"] = participant_id;
    header["submitted_at"] = submitted_at;
    out << header.dump() << "\n";
    for (const auto& [id, answer] : predictions) {
        nlohmann::json j;
        j["question_id"] = id;
        j["answer"] = answer;
        out << j.dump() << "\n";
    }
}

nlohmann::json ScoreReport::to_json() const {
    nlohmann::json j;
    for (const auto& [cls, s] : per_class) {
        j[cls] = {{"macro_f1", s.macro_f1},
                  {"balanced_accuracy", s.balanced_accuracy},
                  {"n_questions", s.n_questions},
                  {"coverage", s.coverage}};
    }
    return j;
}

ScoreReport score(const Submission& submission, const BenchmarkArtifact& benchmark) {
    auto truth = truth_labels(benchmark);
    std::map<std::string, MetricAccumulator> acc;
    for (const auto& q : benchmark.questions) {
        auto t = truth.find(q.question_id);
        if (t == truth.end()) continue;  // unanswered benchmark questions are not scored
        acc[to_string(q.question_class)].add(scored_question(q, t->second, submission));
    }
    ScoreReport report;
    for (const auto& [cls, a] : acc) {
        ClassScore s;
        s.macro_f1 = a.macro_f1();
        s.balanced_accuracy = a.balanced_accuracy();
        s.n_questions = static_cast<std::size_t>(a.total);
        s.coverage = a.total > 0 ? static_cast<double>(a.answered) / a.total : 0.0;
        report.per_class[cls] = s;
    }
    return report;
}

BootstrapComparison hierarchical_bootstrap_compare(const Submission& sub_a,
                                                   const Submission& sub_b,
                                                   const BenchmarkArtifact& benchmark,
                                                   QuestionClass question_class, Metric metric,
                                                   int n_resamples, std::uint64_t seed,
                                                   int threads) {
    if (n_resamples < 1000)
        throw std::invalid_argument("hierarchical bootstrap requires n_resamples >= 1000");

    auto truth = truth_labels(benchmark);

    // trials, then questions within trials, in stable benchmark order
    std::vector<std::string> trial_ids;
    std::map<std::string, std::vector<std::pair<ScoredQuestion, ScoredQuestion>>> grouped;
    for (const auto& q : benchmark.questions) {
        if (q.question_class != question_class) continue;
        auto t = truth.find(q.question_id);
        if (t == truth.end()) continue;
        if (!grouped.count(q.nct_id)) trial_ids.push_back(q.nct_id);
        grouped[q.nct_id].emplace_back(scored_question(q, t->second, sub_a),
                                       scored_question(q, t->second, sub_b));
    }

    BootstrapComparison result;
    if (trial_ids.size() < 2) return result;  // interval undefined, flagged
    result.defined = true;

    std::vector<const std::vector<std::pair<ScoredQuestion, ScoredQuestion>>*> trials;
    trials.reserve(trial_ids.size());
    for (const auto& id : trial_ids) trials.push_back(&grouped.at(id));

    std::vector<double> diffs(static_cast<std::size_t>(n_resamples));
    parallel_for(static_cast<std::size_t>(n_resamples), threads, [&](std::size_t r) {
        PortableRng rng(mix_seed(seed ^ (0x51ed2701ULL + r)));
        MetricAccumulator acc_a, acc_b;
        const std::size_t n_trials = trials.size();
        for (std::size_t i = 0; i < n_trials; ++i) {
            const auto& questions = *trials[rng.bounded(n_trials)];
            const std::size_t m = questions.size();
            for (std::size_t k = 0; k < m; ++k) {
                const auto& q = questions[rng.bounded(m)];
                acc_a.add(q.first);
                acc_b.add(q.second);
            }
        }
        diffs[r] = acc_a.metric(metric) - acc_b.metric(metric);
    });

    std::vector<double> sorted = diffs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::size_t lo_index = static_cast<std::size_t>(std::floor(0.025 * static_cast<double>(n)));
    std::size_t hi_index = static_cast<std::size_t>(std::ceil(0.975 * static_cast<double>(n)));
    if (hi_index > 0) --hi_index;
    if (lo_index >= n) lo_index = n - 1;
    if (hi_index >= n) hi_index = n - 1;
    result.lo = sorted[lo_index];
    result.hi = sorted[hi_index];
    result.significant = result.lo > 0.0 || result.hi < 0.0;
    return result;
}

std::vector<LeaderboardRow> leaderboard(const std::vector<Submission>& submissions,
                                        const BenchmarkArtifact& benchmark,
                                        QuestionClass headline_class, Metric headline_metric) {
    std::vector<LeaderboardRow> rows;
    for (const auto& s : submissions) {
        LeaderboardRow row;
        row.participant_id = s.participant_id;
        row.submitted_at = s.submitted_at;
        row.report = score(s, benchmark);
        auto it = row.report.per_class.find(to_string(headline_class));
        if (it != row.report.per_class.end()) {
            row.headline = headline_metric == Metric::balanced_accuracy
                               ? it->second.balanced_accuracy
                               : it->second.macro_f1;
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
        if (a.headline != b.headline) return a.headline > b.headline;
        if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
        return a.participant_id < b.participant_id;
    });
    return rows;
}

std::string render_leaderboard_text(const std::vector<LeaderboardRow>& rows,
                                    QuestionClass headline_class, Metric headline_metric) {
    std::ostringstream out;
    out << "rank  participant                     " << to_string(headline_class) << " "
        << to_string(headline_metric) << "  submitted_at\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        char value[32];
        std::snprintf(value, sizeof(value), "%.4f", rows[i].headline);
        out << (i + 1) << "     " << rows[i].participant_id;
        for (std::size_t pad = rows[i].participant_id.size(); pad < 32; ++pad) out << ' ';
        out << value << "  " << rows[i].submitted_at << "\n";
    }
    return out.str();
}

nlohmann::json leaderboard_to_json(const std::vector<LeaderboardRow>& rows,
                                   QuestionClass headline_class, Metric headline_metric) {
    nlohmann::json j;
    j["headline_class"] = to_string(headline_class);
    j["headline_metric"] = to_string(headline_metric);
    j["rows"] = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        nlohmann::json row;
        row["rank"] = i + 1;
        row["participant_id"] = rows[i].participant_id;
        row["submitted_at"] = rows[i].submitted_at;
        row["headline"] = rows[i].headline;
        row["scores"] = rows[i].report.to_json();
        j["rows"].push_back(std::move(row));
    }
    return j;
}

}  // namespace ctopen
