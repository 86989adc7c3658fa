// ctopen: benchmark-construction pipeline driver.
//
// Subcommands mirror the pipeline stages: ingest registry exports, screen
// and decontaminate a trial pool against a cutoff date, build candidate
// question pools, generate and verify answers, assemble benchmark files,
// score submissions and render leaderboards. All external traffic can be
// recorded to and replayed from fixture directories.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "ctopen/assets.hpp"
#include "ctopen/benchgen.hpp"
#include "ctopen/cache.hpp"
#include "ctopen/config.hpp"
#include "ctopen/decon.hpp"
#include "ctopen/live_transport.hpp"
#include "ctopen/registry.hpp"
#include "ctopen/scoring.hpp"
#include "ctopen/search.hpp"

namespace fs = std::filesystem;
using namespace ctopen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIntegrity = 3;
constexpr int kExitBackend = 4;

struct GlobalOptions {
    std::string config_path;
    std::string replay_dir;
    std::string record_dir;
    std::string cache_dir;
    std::string assets_dir;
    std::string today;
    int concurrency = 0;
};

RunConfig resolve_config(const GlobalOptions& g) {
    RunConfig config =
        g.config_path.empty() ? RunConfig::defaults() : RunConfig::load(g.config_path);
    if (g.config_path.empty()) config.apply_env_overrides();
    if (!g.replay_dir.empty()) config.replay_dir = g.replay_dir;
    if (!g.record_dir.empty()) config.record_dir = g.record_dir;
    if (!g.cache_dir.empty()) config.cache_dir = g.cache_dir;
    if (!g.assets_dir.empty()) config.assets_dir = g.assets_dir;
    if (g.concurrency > 0) config.concurrency = g.concurrency;
    if (!g.today.empty()) {
        auto d = parse_iso_date(g.today);
        if (!d) throw ConfigError("--today: invalid date \"" + g.today + "\"");
        config.today = d;
    }
    return config;
}

Date parse_date_arg(const std::string& value, const std::string& flag) {
    auto d = parse_iso_date(value);
    if (!d) throw ConfigError(flag + ": invalid date \"" + value + "\"");
    return *d;
}

ChallengeWindow parse_window_arg(const std::string& value) {
    auto colon = value.find(':');
    if (colon == std::string::npos)
        throw ConfigError("--window: expected START:END, got \"" + value + "\"");
    return ChallengeWindow::from_dates(parse_date_arg(value.substr(0, colon), "--window"),
                                       parse_date_arg(value.substr(colon + 1), "--window"));
}

std::vector<TrialRecord> read_trials(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("trials file not found: " + path);
    std::vector<TrialRecord> trials;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        trials.push_back(parse_trial_record(nlohmann::json::parse(line)));
    }
    return trials;
}

void write_trials(const std::vector<TrialRecord>& trials, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& t : trials) out << to_canonical_json(t).dump() << "\n";
}

std::vector<DeconDecision> read_decisions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("decisions file not found: " + path);
    std::vector<DeconDecision> decisions;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        decisions.push_back(DeconDecision::from_json(nlohmann::json::parse(line)));
    }
    return decisions;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    out << j.dump(2) << "\n";
}

std::vector<BenchmarkQuestion> read_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("questions file not found: " + path);
    std::vector<BenchmarkQuestion> questions;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.value("kind", "question") == "question") {
            j.erase("kind");
            questions.push_back(BenchmarkQuestion::from_json(j));
        }
    }
    return questions;
}

struct Pipeline {
    RunConfig config;
    AssetStore assets;
    std::shared_ptr<Transport> transport;
    std::unique_ptr<DocumentCache> cache;
    std::unique_ptr<SearchEngine> engine;

    explicit Pipeline(RunConfig cfg, const std::vector<std::string>& required_backends)
        : config(std::move(cfg)), assets(config.assets_dir) {
        config.require_backends(required_backends);
        transport = make_transport_stack(config);
        cache = std::make_unique<DocumentCache>(config.cache_dir);
        engine = std::make_unique<SearchEngine>(transport, *cache, assets, config);
    }
};

const std::vector<std::string> kAllBackends = {
    "llm_search_a", "llm_search_b", "judge",     "web_index", "db.pubmed",
    "db.pmc",       "db.biorxiv",   "db.medrxiv", "fetch.direct", "ocr"};

QuestionClass parse_class_arg(const std::string& value) {
    if (value != "superiority" && value != "comparative_effect" &&
        value != "endpoint_trial" && value != "endpoint_any_arm")
        throw ConfigError("--class: unknown question class \"" + value + "\"");
    return question_class_from_string(value);
}

Metric parse_metric_arg(const std::string& value) {
    if (value == "balanced_accuracy") return Metric::balanced_accuracy;
    if (value == "macro_f1") return Metric::macro_f1;
    throw ConfigError("--metric: expected balanced_accuracy or macro_f1");
}

int run(int argc, char** argv) {
    CLI::App app{"clinical-trial benchmark construction pipeline"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--config", g.config_path, "run configuration file");
    app.add_option("--replay", g.replay_dir, "replay fixture directory (no network access)");
    app.add_option("--record", g.record_dir, "record fixtures to this directory");
    app.add_option("--cache-dir", g.cache_dir, "document cache directory");
    app.add_option("--assets", g.assets_dir, "assets directory");
    app.add_option("--today", g.today, "pin the clock date (ISO) for reproducible runs");
    app.add_option("--concurrency", g.concurrency, "global concurrency ceiling");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "registry exports -> canonical records");
    std::vector<std::string> ingest_inputs;
    std::string ingest_out;
    ingest->add_option("--in", ingest_inputs, "export files or directories")->required();
    ingest->add_option("--out", ingest_out, "canonical line-delimited output")->required();

    // screen
    auto* screen = app.add_subcommand("screen", "initial screening pass over a trial pool");
    std::string screen_trials, screen_out, screen_report;
    screen->add_option("--trials", screen_trials)->required();
    screen->add_option("--out", screen_out, "surviving trials")->required();
    screen->add_option("--report", screen_report, "screen report json");

    // decon
    auto* decon = app.add_subcommand("decon", "full decontamination run against a cutoff");
    std::string decon_trials, decon_cutoff, decon_decisions, decon_report, decon_accepted;
    decon->add_option("--trials", decon_trials)->required();
    decon->add_option("--cutoff", decon_cutoff, "cutoff date (ISO)")->required();
    decon->add_option("--decisions", decon_decisions, "per-trial decision records")->required();
    decon->add_option("--report", decon_report, "run report json");
    decon->add_option("--accepted", decon_accepted, "accepted trials output");

    // pool
    auto* pool = app.add_subcommand("pool", "candidate question set for a future challenge");
    std::string pool_trials, pool_window, pool_questions, pool_eligible, pool_report;
    pool->add_option("--trials", pool_trials)->required();
    pool->add_option("--window", pool_window, "challenge window START:END")->required();
    pool->add_option("--questions", pool_questions, "candidate questions output")->required();
    pool->add_option("--eligible", pool_eligible, "surviving trials output");
    pool->add_option("--report", pool_report, "exclusion report json");

    // answers
    auto* answers = app.add_subcommand("answers", "derive and verify answers from evidence");
    std::string ans_questions, ans_trials, ans_decisions, ans_window, ans_out, ans_report;
    answers->add_option("--questions", ans_questions)->required();
    answers->add_option("--trials", ans_trials)->required();
    answers->add_option("--decisions", ans_decisions)->required();
    answers->add_option("--window", ans_window, "challenge window START:END")->required();
    answers->add_option("--out", ans_out, "answers output")->required();
    answers->add_option("--report", ans_report, "answer-run report json");

    // assemble
    auto* assemble = app.add_subcommand("assemble", "assemble the time-stamped benchmark file");
    std::string asm_questions, asm_answers, asm_decisions, asm_window, asm_out, asm_pool_out;
    assemble->add_option("--questions", asm_questions)->required();
    assemble->add_option("--answers", asm_answers)->required();
    assemble->add_option("--decisions", asm_decisions)->required();
    assemble->add_option("--window", asm_window)->required();
    assemble->add_option("--out", asm_out, "benchmark file")->required();
    assemble->add_option("--pool-out", asm_pool_out, "submission-facing file (no answers)");

    // score
    auto* score_cmd = app.add_subcommand("score", "score a submission against a benchmark");
    std::string score_benchmark, score_submission, score_out, score_compare;
    std::string score_class = "superiority", score_metric = "balanced_accuracy";
    int score_resamples = 10000;
    std::uint64_t score_seed = 17;
    score_cmd->add_option("--benchmark", score_benchmark)->required();
    score_cmd->add_option("--submission", score_submission)->required();
    score_cmd->add_option("--out", score_out, "score report json");
    score_cmd->add_option("--compare-with", score_compare,
                          "second submission for a bootstrap significance test");
    score_cmd->add_option("--class", score_class, "question class for the comparison");
    score_cmd->add_option("--metric", score_metric, "balanced_accuracy or macro_f1");
    score_cmd->add_option("--resamples", score_resamples, "bootstrap resamples (>= 1000)");
    score_cmd->add_option("--seed", score_seed, "bootstrap seed");

    // leaderboard
    auto* lb = app.add_subcommand("leaderboard", "rank submissions");
    std::string lb_benchmark, lb_out, lb_text;
    std::vector<std::string> lb_submissions;
    std::string lb_class = "superiority", lb_metric = "balanced_accuracy";
    lb->add_option("--benchmark", lb_benchmark)->required();
    lb->add_option("--submissions", lb_submissions)->required();
    lb->add_option("--class", lb_class);
    lb->add_option("--metric", lb_metric);
    lb->add_option("--out", lb_out, "machine-readable leaderboard");
    lb->add_option("--text", lb_text, "plain-text leaderboard");

    // cache
    auto* cache_cmd = app.add_subcommand("cache", "inspect or evict cached documents");
    std::string cache_action, cache_url;
    cache_cmd->add_option("action", cache_action, "inspect | evict")->required();
    cache_cmd->add_option("--url", cache_url, "url to evict");

    // fixtures
    auto* fixtures = app.add_subcommand("fixtures", "record/replay fixture management");
    std::string fixtures_action, fixtures_dir;
    fixtures->add_option("action", fixtures_action, "inspect | verify")->required();
    fixtures->add_option("--dir", fixtures_dir, "fixture directory")->required();

    // global flags are accepted after the subcommand as well
    for (CLI::App* sub : {ingest, screen, decon, pool, answers, assemble, score_cmd, lb,
                          cache_cmd, fixtures})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    RunConfig config = resolve_config(g);

    if (ingest->parsed()) {
        std::vector<TrialRecord> trials;
        for (const auto& input : ingest_inputs) {
            std::vector<std::string> files;
            if (fs::is_directory(input)) {
                for (const auto& entry : fs::directory_iterator(input))
                    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
                std::sort(files.begin(), files.end());
            } else {
                files.push_back(input);
            }
            for (const auto& file : files) {
                std::ifstream in(file);
                if (!in) throw ConfigError("input not found: " + file);
                std::string first_line;
                std::getline(in, first_line);
                in.seekg(0);
                bool jsonl = first_line.find("\"nct_id\"") != std::string::npos ||
                             fs::path(file).extension() == ".jsonl";
                if (jsonl) {
                    std::string line;
                    while (std::getline(in, line)) {
                        if (!line.empty())
                            trials.push_back(parse_trial_record(nlohmann::json::parse(line)));
                    }
                } else {
                    nlohmann::json j;
                    in >> j;
                    if (j.is_array())
                        for (const auto& item : j) trials.push_back(parse_trial_record(item));
                    else
                        trials.push_back(parse_trial_record(j));
                }
            }
        }
        write_trials(trials, ingest_out);
        std::cout << "ingested " << trials.size() << " trials -> " << ingest_out << "\n";
        return kExitOk;
    }

    if (screen->parsed()) {
        Pipeline p(config, {"llm_search_a"});
        auto trials = read_trials(screen_trials);
        auto outcome = initial_screen(trials, *p.engine, p.config.concurrency);
        write_trials(outcome.survivors, screen_out);
        if (!screen_report.empty()) {
            nlohmann::json report;
            report["input_trials"] = trials.size();
            report["survivors"] = outcome.survivors.size();
            report["removed_no_results_anywhere"] = outcome.removed.size();
            report["deferred"] = nlohmann::json::array();
            for (const auto& d : outcome.deferred)
                report["deferred"].push_back({{"nct_id", d.nct_id}, {"error", d.error}});
            report["prompt_version"] = p.config.prompt_version;
            report["config_digest"] = p.config.digest();
            write_json(report, screen_report);
        }
        std::cout << "screened " << trials.size() << " trials: " << outcome.survivors.size()
                  << " survive, " << outcome.removed.size() << " removed, "
                  << outcome.deferred.size() << " deferred\n";
        return outcome.deferred.empty() ? kExitOk : kExitBackend;
    }

    if (decon->parsed()) {
        Pipeline p(config, kAllBackends);
        auto trials = read_trials(decon_trials);
        Date cutoff = parse_date_arg(decon_cutoff, "--cutoff");
        DeconRun run = run_decontamination(trials, cutoff, *p.engine, p.config.concurrency);
        {
            std::ofstream out(decon_decisions, std::ios::trunc);
            for (const auto& d : run.decisions) out << d.to_json().dump() << "\n";
        }
        if (!decon_accepted.empty()) write_trials(run.accepted, decon_accepted);
        run.report.config_digest = p.config.digest();
        if (!decon_report.empty()) write_json(run.report.to_json(), decon_report);
        std::cout << "decontaminated " << trials.size() << " trials: " << run.accepted.size()
                  << " accepted, " << run.report.deferred.size() << " deferred\n";
        return kExitOk;
    }

    if (pool->parsed()) {
        Pipeline p(config, {"llm_search_a", "judge"});
        auto trials = read_trials(pool_trials);
        ChallengeWindow window = parse_window_arg(pool_window);
        CandidatePool candidate = build_candidate_pool(trials, window, *p.engine,
                                                       p.config.concurrency);
        {
            std::ofstream out(pool_questions, std::ios::trunc);
            for (const auto& q : candidate.questions) {
                nlohmann::json j = q.to_json();
                j["kind"] = "question";
                out << j.dump() << "\n";
            }
        }
        if (!pool_eligible.empty()) write_trials(candidate.eligible, pool_eligible);
        if (!pool_report.empty()) {
            nlohmann::json report = candidate.report.to_json();
            report["prompt_version"] = p.config.prompt_version;
            report["config_digest"] = p.config.digest();
            write_json(report, pool_report);
        }
        std::cout << "pool: " << candidate.report.surviving_trials << " trials, "
                  << candidate.questions.size() << " candidate questions\n";
        return kExitOk;
    }

    if (answers->parsed()) {
        Pipeline p(config, kAllBackends);
        auto questions = read_questions(ans_questions);
        auto trials = read_trials(ans_trials);
        auto decisions = read_decisions(ans_decisions);
        ChallengeWindow window = parse_window_arg(ans_window);

        std::set<std::string> accepted;
        for (const auto& d : decisions)
            if (d.status == DeconStatus::accepted) accepted.insert(d.nct_id);

        std::map<std::string, TrialRecord> by_id;
        for (const auto& t : trials)
            if (accepted.count(t.nct_id)) by_id[t.nct_id] = t;

        std::vector<BenchmarkQuestion> answerable;
        for (const auto& q : questions)
            if (by_id.count(q.nct_id)) answerable.push_back(q);

        std::map<std::string, std::vector<EvidenceDocument>> evidence;
        for (const auto& [nct, trial] : by_id)
            evidence[nct] = gather_window_evidence(trial, window, *p.engine);

        JudgeClient judge(p.transport, p.assets, p.config.prompt_version);
        AnswerRun run =
            generate_answers(answerable, by_id, evidence, judge, p.config.concurrency);
        {
            std::ofstream out(ans_out, std::ios::trunc);
            for (const auto& a : run.answers) out << a.to_json().dump() << "\n";
        }
        if (!ans_report.empty()) {
            nlohmann::json report;
            std::size_t verified = 0;
            for (const auto& a : run.answers)
                if (a.verification == AnswerVerification::verified) ++verified;
            report["questions_considered"] = answerable.size();
            report["answers_verified"] = verified;
            report["answers_discarded"] = run.answers.size() - verified;
            report["deferred"] = nlohmann::json::array();
            for (const auto& [qid, error] : run.deferred)
                report["deferred"].push_back({{"question_id", qid}, {"error", error}});
            report["prompt_version"] = p.config.prompt_version;
            report["config_digest"] = p.config.digest();
            write_json(report, ans_report);
        }
        std::cout << "answers: " << run.answers.size() << " decided, " << run.deferred.size()
                  << " deferred\n";
        return kExitOk;
    }

    if (assemble->parsed()) {
        auto questions = read_questions(asm_questions);
        std::vector<BenchmarkAnswer> answer_list;
        {
            std::ifstream in(asm_answers);
            if (!in) throw ConfigError("answers file not found: " + asm_answers);
            std::string line;
            while (std::getline(in, line))
                if (!line.empty())
                    answer_list.push_back(BenchmarkAnswer::from_json(nlohmann::json::parse(line)));
        }
        auto decisions = read_decisions(asm_decisions);
        ChallengeWindow window = parse_window_arg(asm_window);
        BenchmarkArtifact artifact = assemble_benchmark(decisions, questions, answer_list, window);
        write_benchmark_file(artifact, asm_out, true);
        if (!asm_pool_out.empty()) write_benchmark_file(artifact, asm_pool_out, false);
        std::cout << "benchmark: " << artifact.stats.total_questions << " questions over "
                  << artifact.stats.unique_trials << " trials -> " << asm_out << "\n";
        return kExitOk;
    }

    if (score_cmd->parsed()) {
        BenchmarkArtifact benchmark = read_benchmark_file(score_benchmark);
        Submission submission = Submission::load(score_submission, benchmark);
        ScoreReport report = score(submission, benchmark);
        nlohmann::json out;
        out["participant_id"] = submission.participant_id;
        out["scores"] = report.to_json();
        if (!score_compare.empty()) {
            Submission other = Submission::load(score_compare, benchmark);
            BootstrapComparison cmp = hierarchical_bootstrap_compare(
                submission, other, benchmark, parse_class_arg(score_class),
                parse_metric_arg(score_metric), score_resamples, score_seed,
                config.concurrency);
            nlohmann::json c;
            c["class"] = score_class;
            c["metric"] = score_metric;
            c["defined"] = cmp.defined;
            c["interval"] = {cmp.lo, cmp.hi};
            c["significant"] = cmp.significant;
            c["n_resamples"] = score_resamples;
            c["seed"] = score_seed;
            out["comparison"] = std::move(c);
        }
        if (!score_out.empty()) write_json(out, score_out);
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }

    if (lb->parsed()) {
        BenchmarkArtifact benchmark = read_benchmark_file(lb_benchmark);
        std::vector<Submission> submissions;
        for (const auto& path : lb_submissions)
            submissions.push_back(Submission::load(path, benchmark));
        auto rows = leaderboard(submissions, benchmark, parse_class_arg(lb_class),
                                parse_metric_arg(lb_metric));
        std::string text =
            render_leaderboard_text(rows, parse_class_arg(lb_class), parse_metric_arg(lb_metric));
        if (!lb_out.empty())
            write_json(leaderboard_to_json(rows, parse_class_arg(lb_class),
                                           parse_metric_arg(lb_metric)),
                       lb_out);
        if (!lb_text.empty()) {
            std::ofstream out(lb_text, std::ios::trunc);
            out << text;
        }
        std::cout << text;
        return kExitOk;
    }

    if (cache_cmd->parsed()) {
        DocumentCache cache(config.cache_dir);
        if (cache_action == "inspect") {
            for (const auto& e : cache.entries()) {
                nlohmann::json j = e.to_json();
                j.erase("extracted_text");
                std::cout << j.dump() << "\n";
            }
            std::cout << "cache entries: " << cache.entries().size() << "\n";
            return kExitOk;
        }
        if (cache_action == "evict") {
            if (cache_url.empty()) throw ConfigError("cache evict requires --url");
            bool removed = cache.evict(cache_url);
            std::cout << (removed ? "evicted " : "not cached: ") << cache_url << "\n";
            return kExitOk;
        }
        throw ConfigError("cache: unknown action \"" + cache_action + "\"");
    }

    if (fixtures->parsed()) {
        FixtureStore store = FixtureStore::load(fixtures_dir);
        if (fixtures_action == "inspect" || fixtures_action == "verify") {
            for (const auto& [backend, count] : store.per_backend_counts())
                std::cout << backend << ": " << count << " recorded responses\n";
            std::cout << "total: " << store.size() << "\n";
            return kExitOk;
        }
        throw ConfigError("fixtures: unknown action \"" + fixtures_action + "\"");
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity violation: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const SubmissionError& e) {
        std::cerr << "integrity violation: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const RegistryParseError& e) {
        std::cerr << "integrity violation: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const BackendError& e) {
        std::cerr << "backend failure: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
