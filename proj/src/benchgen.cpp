#include "ctopen/benchgen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ctopen/concurrency.hpp"
#include "ctopen/sha256.hpp"

namespace ctopen {

namespace {

constexpr std::size_t kEvidenceTextCap = 8000;
constexpr std::int64_t kCompletionSlackDays = 31;

std::string arm_display(const StudyArm& arm) { return arm.label; }

std::string option_letter(int index) { return std::string(1, static_cast<char>('a' + index)); }

int letter_option(const std::string& decision) {
    if (decision.size() == 1 && decision[0] >= 'a' && decision[0] <= 'z')
        return decision[0] - 'a';
    return -1;
}

std::vector<std::string> doc_urls(const std::vector<EvidenceDocument>& docs) {
    std::vector<std::string> urls;
    urls.reserve(docs.size());
    for (const auto& d : docs) urls.push_back(d.url);
    return urls;
}

}  // namespace

ChallengeWindow ChallengeWindow::from_dates(const Date& start, const Date& end) {
    if (!(start < end))
        throw IntegrityError("challenge window start must precede end");
    ChallengeWindow w;
    w.start = start;
    w.end = end;
    w.cutoff = start.plus_days(-1);
    return w;
}

nlohmann::json ChallengeWindow::to_json() const {
    return {{"start", start.to_iso()}, {"end", end.to_iso()}, {"cutoff", cutoff.to_iso()}};
}

ChallengeWindow ChallengeWindow::from_json(const nlohmann::json& j) {
    auto start = parse_iso_date(j.at("start").get<std::string>());
    auto end = parse_iso_date(j.at("end").get<std::string>());
    if (!start || !end) throw IntegrityError("challenge window has invalid dates");
    return from_dates(*start, *end);
}

std::string to_string(QuestionClass c) {
    switch (c) {
        case QuestionClass::superiority: return "superiority";
        case QuestionClass::comparative_effect: return "comparative_effect";
        case QuestionClass::endpoint_trial: return "endpoint_trial";
        case QuestionClass::endpoint_any_arm: return "endpoint_any_arm";
    }
    return "endpoint_trial";
}

QuestionClass question_class_from_string(const std::string& s) {
    if (s == "superiority") return QuestionClass::superiority;
    if (s == "comparative_effect") return QuestionClass::comparative_effect;
    if (s == "endpoint_any_arm") return QuestionClass::endpoint_any_arm;
    return QuestionClass::endpoint_trial;
}

nlohmann::json BenchmarkQuestion::to_json() const {
    nlohmann::json j;
    j["question_id"] = question_id;
    j["nct_id"] = nct_id;
    j["question_class"] = ctopen::to_string(question_class);
    j["outcome_measure_index"] = outcome_measure_index;
    if (focal_arm) j["focal_arm"] = *focal_arm;
    if (comparator_arm) j["comparator_arm"] = *comparator_arm;
    j["options"] = options;
    j["cutoff"] = cutoff.to_iso();
    return j;
}

BenchmarkQuestion BenchmarkQuestion::from_json(const nlohmann::json& j) {
    BenchmarkQuestion q;
    q.question_id = j.at("question_id").get<std::string>();
    q.nct_id = j.value("nct_id", "");
    q.question_class = question_class_from_string(j.value("question_class", "endpoint_trial"));
    q.outcome_measure_index = j.value("outcome_measure_index", 0);
    if (j.contains("focal_arm")) q.focal_arm = j["focal_arm"].get<std::string>();
    if (j.contains("comparator_arm")) q.comparator_arm = j["comparator_arm"].get<std::string>();
    if (j.contains("options")) q.options = j["options"].get<std::vector<std::string>>();
    if (j.contains("cutoff")) {
        if (auto c = parse_iso_date(j["cutoff"].get<std::string>())) q.cutoff = *c;
    }
    return q;
}

nlohmann::json BenchmarkAnswer::to_json() const {
    nlohmann::json j;
    j["question_id"] = question_id;
    j["label"] = label;
    j["supporting_documents"] = supporting_documents;
    j["verification"] = verification == AnswerVerification::verified ? "verified" : "discarded";
    return j;
}

BenchmarkAnswer BenchmarkAnswer::from_json(const nlohmann::json& j) {
    BenchmarkAnswer a;
    a.question_id = j.at("question_id").get<std::string>();
    a.label = j.value("label", -1);
    if (j.contains("supporting_documents"))
        a.supporting_documents = j["supporting_documents"].get<std::vector<std::string>>();
    a.verification = j.value("verification", "") == "verified" ? AnswerVerification::verified
                                                               : AnswerVerification::discarded;
    return a;
}

std::string question_id_for(const std::string& nct_id, int measure_index, QuestionClass cls,
                            const std::string& focal_arm, const std::string& comparator_arm) {
    Sha256 h;
    h.update(nct_id);
    h.update("|");
    h.update(std::to_string(measure_index));
    h.update("|");
    h.update(to_string(cls));
    h.update("|");
    h.update(focal_arm);
    h.update("|");
    h.update(comparator_arm);
    return "q_" + h.hex_digest().substr(0, 16);
}

std::vector<BenchmarkQuestion> generate_questions(const TrialRecord& trial, const Date& cutoff) {
    std::vector<int> all(trial.outcome_measures.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return generate_questions_for_measures(trial, cutoff, all);
}

std::vector<BenchmarkQuestion> generate_questions_for_measures(
    const TrialRecord& trial, const Date& cutoff, const std::vector<int>& measure_indices) {
    std::vector<BenchmarkQuestion> out;
    auto treatments = trial.treatment_arms();
    auto comparators = trial.comparator_arms();

    for (int m : measure_indices) {
        if (m < 0 || static_cast<std::size_t>(m) >= trial.outcome_measures.size()) continue;

        auto make = [&](QuestionClass cls, const StudyArm* focal, const StudyArm* comparator,
                        std::vector<std::string> options) {
            BenchmarkQuestion q;
            q.nct_id = trial.nct_id;
            q.question_class = cls;
            q.outcome_measure_index = m;
            if (focal) q.focal_arm = arm_display(*focal);
            if (comparator) q.comparator_arm = arm_display(*comparator);
            q.options = std::move(options);
            q.cutoff = cutoff;
            q.question_id = question_id_for(trial.nct_id, m, cls, q.focal_arm.value_or(""),
                                            q.comparator_arm.value_or(""));
            out.push_back(std::move(q));
        };

        make(QuestionClass::endpoint_trial, nullptr, nullptr,
             {"The trial met this endpoint.", "The trial did not meet this endpoint."});
        make(QuestionClass::endpoint_any_arm, nullptr, nullptr,
             {"At least one arm met this endpoint.", "No arm met this endpoint."});

        for (const StudyArm* t : treatments) {
            for (const StudyArm* c : comparators) {
                if (c->arm_type == ArmType::active_comparator) {
                    make(QuestionClass::comparative_effect, t, c,
                         {arm_display(*c) + " is statistically significantly worse than " +
                              arm_display(*t) + ".",
                          arm_display(*t) + " is statistically significantly worse than " +
                              arm_display(*c) + ".",
                          "No statistically significant difference between " + arm_display(*t) +
                              " and " + arm_display(*c) + "."});
                } else {
                    make(QuestionClass::superiority, t, c,
                         {arm_display(*t) + " achieved statistically significant improvements over " +
                              arm_display(*c) + ".",
                          arm_display(*t) +
                              " has not achieved statistically significant improvements over " +
                              arm_display(*c) + "."});
                }
            }
        }
    }
    return out;
}

nlohmann::json PoolExclusionReport::to_json() const {
    nlohmann::json j;
    j["input_trials"] = input_trials;
    j["ineligible_enrollment"] = ineligible_enrollment;
    j["ineligible_intervention"] = ineligible_intervention;
    j["ineligible_allocation"] = ineligible_allocation;
    j["ineligible_design"] = ineligible_design;
    j["excluded_completion_date"] = excluded_completion_date;
    j["flagged_missing_completion_date"] = flagged_missing_completion_date;
    j["excluded_pre_window_results"] = excluded_pre_window_results;
    j["deferred_screen_failures"] = deferred_screen_failures;
    j["dropped_measure_pairs_timeframe"] = dropped_measure_pairs_timeframe;
    j["flagged_unparseable_timeframe"] = flagged_unparseable_timeframe;
    j["surviving_trials"] = surviving_trials;
    j["surviving_measure_pairs"] = surviving_measure_pairs;
    j["question_counts"] = question_counts;
    return j;
}

CandidatePool build_candidate_pool(const std::vector<TrialRecord>& trials,
                                   const ChallengeWindow& window, SearchEngine& engine,
                                   int concurrency) {
    CandidatePool pool;
    pool.report.input_trials = trials.size();

    // eligibility: enrollment, drug intervention, randomization, controlled design
    std::vector<const TrialRecord*> stage1;
    for (const auto& t : trials) {
        if (t.enrollment < 50) {
            ++pool.report.ineligible_enrollment;
            continue;
        }
        if (!t.has_intervention_type(InterventionType::drug)) {
            ++pool.report.ineligible_intervention;
            continue;
        }
        if (t.allocation != Allocation::randomized) {
            ++pool.report.ineligible_allocation;
            continue;
        }
        if (t.comparator_arms().empty()) {
            ++pool.report.ineligible_design;
            continue;
        }
        stage1.push_back(&t);
    }

    // completion-date rule: estimated primary completion more than 31 days
    // past the window end means results are unlikely during the window
    std::vector<const TrialRecord*> stage2;
    for (const TrialRecord* t : stage1) {
        if (!t->estimated_primary_completion_date) {
            ++pool.report.flagged_missing_completion_date;
            stage2.push_back(t);
            continue;
        }
        if (days_between(window.end, *t->estimated_primary_completion_date) >
            kCompletionSlackDays) {
            ++pool.report.excluded_completion_date;
            continue;
        }
        stage2.push_back(t);
    }

    // pre-window public-results screen
    std::vector<char> has_pre_window(stage2.size(), 0);
    std::vector<char> deferred(stage2.size(), 0);
    parallel_for(stage2.size(), concurrency, [&](std::size_t i) {
        try {
            auto docs = engine.search(*stage2[i], DateWindow::before(window.start),
                                      SearchMode::llm_search_a, 1);
            has_pre_window[i] = docs.empty() ? 0 : 1;
        } catch (const BackendError&) {
            deferred[i] = 1;
        }
    });

    for (std::size_t i = 0; i < stage2.size(); ++i) {
        if (deferred[i]) {
            ++pool.report.deferred_screen_failures;
            continue;
        }
        if (has_pre_window[i]) {
            ++pool.report.excluded_pre_window_results;
            continue;
        }
        const TrialRecord& t = *stage2[i];

        // outcome-measure time-frame filter: a time frame longer than the
        // elapsed time between study start and window end would only yield
        // an interim result
        std::vector<int> surviving_measures;
        std::int64_t elapsed = days_between(t.study_start_date, window.end);
        for (std::size_t m = 0; m < t.outcome_measures.size(); ++m) {
            const auto& measure = t.outcome_measures[m];
            if (!measure.time_frame_days) {
                ++pool.report.flagged_unparseable_timeframe;
                surviving_measures.push_back(static_cast<int>(m));
                continue;
            }
            if (*measure.time_frame_days > elapsed) {
                ++pool.report.dropped_measure_pairs_timeframe;
                continue;
            }
            surviving_measures.push_back(static_cast<int>(m));
        }

        pool.eligible.push_back(t);
        pool.report.surviving_measure_pairs += surviving_measures.size();
        auto questions = generate_questions_for_measures(t, window.cutoff, surviving_measures);
        for (auto& q : questions) pool.questions.push_back(std::move(q));
    }

    pool.report.surviving_trials = pool.eligible.size();
    for (const auto& q : pool.questions)
        ++pool.report.question_counts[to_string(q.question_class)];
    return pool;
}

std::string render_evidence_list(const std::vector<EvidenceDocument>& docs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out << "[" << (i + 1) << "] " << docs[i].url;
        if (docs[i].publication_date) out << " (published " << docs[i].publication_date->to_iso() << ")";
        out << "\n";
        std::string text = docs[i].extracted_text.substr(0, kEvidenceTextCap);
        out << text << "\n\n";
    }
    return out.str();
}

BenchmarkAnswer propose_and_verify_binary_answer(const BenchmarkQuestion& question,
                                                 const TrialRecord& trial,
                                                 const std::vector<EvidenceDocument>& evidence,
                                                 const JudgeClient& judge) {
    BenchmarkAnswer answer;
    answer.question_id = question.question_id;
    answer.supporting_documents = doc_urls(evidence);

    const OutcomeMeasure& measure =
        trial.outcome_measures.at(static_cast<std::size_t>(question.outcome_measure_index));
    std::string arms;
    if (question.focal_arm && question.comparator_arm)
        arms = *question.focal_arm + " vs " + *question.comparator_arm;
    else {
        for (const auto& a : trial.arms) {
            if (!arms.empty()) arms += "; ";
            arms += a.label + " (" + to_string(a.arm_type) + ")";
        }
    }

    std::map<std::string, std::string> values = {
        {"trial_title", trial.brief_title},
        {"endpoint", measure.title},
        {"arms", arms},
        {"option_a", question.options.at(0)},
        {"option_b", question.options.at(1)},
        {"results", render_evidence_list(evidence)},
    };

    auto proposal = judge.ask("answer_binary_proposal", values, {"a", "b"});
    answer.label = letter_option(proposal.decision);

    values["answer"] = proposal.decision;
    auto confirmation = judge.ask("answer_binary_verification", values, {"yes", "no"});
    answer.verification = confirmation.decision == "yes" ? AnswerVerification::verified
                                                         : AnswerVerification::discarded;
    return answer;
}

BenchmarkAnswer answer_comparative(const BenchmarkQuestion& question, const TrialRecord& trial,
                                   const std::vector<EvidenceDocument>& evidence,
                                   const JudgeClient& judge) {
    BenchmarkAnswer answer;
    answer.question_id = question.question_id;
    answer.supporting_documents = doc_urls(evidence);

    const OutcomeMeasure& measure =
        trial.outcome_measures.at(static_cast<std::size_t>(question.outcome_measure_index));
    std::map<std::string, std::string> values = {
        {"trial_text", flatten_protocol(trial, false, false)},
        {"endpoint", measure.title},
        {"focal_arm", question.focal_arm.value_or("")},
        {"comparator_arm", question.comparator_arm.value_or("")},
        {"option_a", question.options.at(0)},
        {"option_b", question.options.at(1)},
        {"option_c", question.options.at(2)},
        {"results", render_evidence_list(evidence)},
    };

    auto reply = judge.ask("answer_comparative", values, {"a", "b", "c", "none"});
    if (reply.decision == "none") {
        answer.verification = AnswerVerification::discarded;
        return answer;
    }
    answer.label = letter_option(reply.decision);
    answer.verification = AnswerVerification::verified;
    return answer;
}

AnswerRun generate_answers(const std::vector<BenchmarkQuestion>& questions,
                           const std::map<std::string, TrialRecord>& trials_by_id,
                           const std::map<std::string, std::vector<EvidenceDocument>>& evidence,
                           const JudgeClient& judge, int concurrency) {
    AnswerRun run;
    std::vector<std::optional<BenchmarkAnswer>> slots(questions.size());
    std::vector<std::string> errors(questions.size());

    parallel_for(questions.size(), concurrency, [&](std::size_t i) {
        const BenchmarkQuestion& q = questions[i];
        auto trial_it = trials_by_id.find(q.nct_id);
        auto evidence_it = evidence.find(q.nct_id);
        if (trial_it == trials_by_id.end()) {
            errors[i] = "unknown trial " + q.nct_id;
            return;
        }
        static const std::vector<EvidenceDocument> kNone;
        const auto& docs = evidence_it == evidence.end() ? kNone : evidence_it->second;
        try {
            if (q.question_class == QuestionClass::comparative_effect)
                slots[i] = answer_comparative(q, trial_it->second, docs, judge);
            else
                slots[i] = propose_and_verify_binary_answer(q, trial_it->second, docs, judge);
        } catch (const std::exception& e) {
            // judge failure: answer deferred, question withheld from release
            errors[i] = e.what();
        }
    });

    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (slots[i])
            run.answers.push_back(std::move(*slots[i]));
        else
            run.deferred.emplace_back(questions[i].question_id, errors[i]);
    }
    return run;
}

std::vector<EvidenceDocument> gather_window_evidence(const TrialRecord& trial,
                                                     const ChallengeWindow& window,
                                                     SearchEngine& engine) {
    DateWindow evidence_window = window.evidence_window();
    auto docs = engine.search(trial, evidence_window, SearchMode::web_index, std::nullopt);
    auto db_docs =
        engine.search(trial, evidence_window, SearchMode::literature_database, std::nullopt);
    for (auto& d : db_docs) {
        bool present = std::any_of(docs.begin(), docs.end(),
                                   [&](const EvidenceDocument& e) { return e.url == d.url; });
        if (!present) docs.push_back(std::move(d));
    }
    return docs;
}

nlohmann::json BenchmarkStats::to_json() const {
    nlohmann::json j;
    j["per_class"] = per_class;
    j["unique_trials"] = unique_trials;
    j["total_questions"] = total_questions;
    return j;
}

BenchmarkArtifact assemble_benchmark(const std::vector<DeconDecision>& decisions,
                                     const std::vector<BenchmarkQuestion>& questions,
                                     const std::vector<BenchmarkAnswer>& answers,
                                     const ChallengeWindow& window) {
    std::set<std::string> accepted;
    for (const auto& d : decisions)
        if (d.status == DeconStatus::accepted) accepted.insert(d.nct_id);

    std::map<std::string, const BenchmarkQuestion*> by_id;
    for (const auto& q : questions) by_id[q.question_id] = &q;

    BenchmarkArtifact artifact;
    artifact.window = window;

    std::set<std::string> trial_ids;
    for (const auto& a : answers) {
        if (a.verification != AnswerVerification::verified) continue;  // discarded stay out
        auto it = by_id.find(a.question_id);
        if (it == by_id.end())
            throw IntegrityError("answer references unknown question " + a.question_id);
        const BenchmarkQuestion& q = *it->second;
        if (!accepted.count(q.nct_id))
            throw IntegrityError("question " + q.question_id + " references trial " + q.nct_id +
                                 " without an accepted decontamination decision");
        artifact.questions.push_back(q);
        artifact.answers.push_back(a);
        trial_ids.insert(q.nct_id);
        ++artifact.stats.per_class[to_string(q.question_class)];
    }
    artifact.stats.unique_trials = trial_ids.size();
    artifact.stats.total_questions = artifact.questions.size();
    return artifact;
}

void write_benchmark_file(const BenchmarkArtifact& artifact, const std::string& path,
                          bool include_answers) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IntegrityError("cannot write benchmark file: " + path);
    nlohmann::json header;
    header["kind"] = "header";
    header["format"] = "ctopen_benchmark";
    header["format_version"] = artifact.format_version;
    header["window"] = artifact.window.to_json();
    header["stats"] = artifact.stats.to_json();
    out << header.dump() << "\n";
    for (const auto& q : artifact.questions) {
        nlohmann::json j = q.to_json();
        j["kind"] = "question";
        out << j.dump() << "\n";
    }
    if (!include_answers) return;
    for (const auto& a : artifact.answers) {
        nlohmann::json j = a.to_json();
        j["kind"] = "answer";
        out << j.dump() << "\n";
    }
}

BenchmarkArtifact read_benchmark_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("benchmark file not found: " + path);
    BenchmarkArtifact artifact;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string kind = j.value("kind", "");
        if (kind == "header") {
            artifact.format_version = j.value("format_version", 1);
            artifact.window = ChallengeWindow::from_json(j.at("window"));
            if (j.contains("stats")) {
                artifact.stats.unique_trials = j["stats"].value("unique_trials", std::size_t{0});
                artifact.stats.total_questions =
                    j["stats"].value("total_questions", std::size_t{0});
                if (j["stats"].contains("per_class"))
                    artifact.stats.per_class =
                        j["stats"]["per_class"].get<std::map<std::string, std::size_t>>();
            }
            have_header = true;
        } else if (kind == "question") {
            artifact.questions.push_back(BenchmarkQuestion::from_json(j));
        } else if (kind == "answer") {
            artifact.answers.push_back(BenchmarkAnswer::from_json(j));
        }
    }
    if (!have_header) throw IntegrityError("benchmark file missing header record: " + path);
    return artifact;
}

}  // namespace ctopen
