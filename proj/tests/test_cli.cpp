#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ctopen/benchgen.hpp"
#include "ctopen/scoring.hpp"
#include "ctopen/decon.hpp"
#include "ctopen/benchgen.hpp"
#include "support/fixtures.hpp"

using namespace ctopen;
using namespace ctopen::testing;

namespace {

std::string cli_bin() {
    const char* bin = std::getenv("CTOPEN_CLI_BIN");
    return bin ? bin : "";
}

int run_cli(const std::string& args, const std::string& capture_to = "/dev/null") {
    std::string command = cli_bin() + " " + args + " > " + capture_to + " 2>&1";
    int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("cli reports usage errors with exit code 2") {
    if (cli_bin().empty()) return;
    CHECK(run_cli("") == 2);
    CHECK(run_cli("unknown-subcommand") == 2);
    CHECK(run_cli("score --benchmark missing.jsonl") == 2);  // missing required flag
}

TEST_CASE("cli ingest converts registry exports to canonical records") {
    if (cli_bin().empty()) return;
    std::string dir = temp_dir("cli_ingest");
    {
        std::ofstream out(dir + "/export.json");
        out << to_canonical_json(tpa_trial()).dump() << "\n";
        out << to_canonical_json(v116_trial()).dump() << "\n";
    }
    CHECK(run_cli("ingest --in " + dir + "/export.json --out " + dir + "/trials.jsonl") == 0);
    std::ifstream in(dir + "/trials.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 2);
}

TEST_CASE("cli scoring runs are deterministic for a fixed seed") {
    if (cli_bin().empty()) return;
    std::string dir = temp_dir("cli_score");

    // benchmark with two trials so the bootstrap is defined
    ChallengeWindow window = ChallengeWindow::from_dates(Date{2025, 2, 1}, Date{2025, 5, 1});
    std::vector<BenchmarkQuestion> questions;
    std::vector<BenchmarkAnswer> answers;
    std::vector<DeconDecision> decisions;
    for (int t = 0; t < 2; ++t) {
        TrialRecord trial = tpa_trial();
        trial.nct_id = "NCT0000000" + std::to_string(t + 1);
        auto qs = generate_questions(trial, window.cutoff);
        for (const auto& q : qs) {
            questions.push_back(q);
            BenchmarkAnswer a;
            a.question_id = q.question_id;
            a.label = 1;
            a.verification = AnswerVerification::verified;
            answers.push_back(a);
        }
        DeconDecision d;
        d.nct_id = trial.nct_id;
        d.status = DeconStatus::accepted;
        d.cutoff = window.cutoff;
        decisions.push_back(d);
    }
    BenchmarkArtifact artifact = assemble_benchmark(decisions, questions, answers, window);
    write_benchmark_file(artifact, dir + "/benchmark.jsonl", true);

    Submission submission;
    submission.participant_id = "team-7";
    submission.submitted_at = "2025-01-15T09:00:00Z";
    for (const auto& q : artifact.questions) submission.predictions[q.question_id] = 1;
    submission.write(dir + "/submission.jsonl");
    Submission rival = submission;
    rival.participant_id = "team-8";
    for (auto& [id, answer] : rival.predictions) answer = 0;
    rival.write(dir + "/rival.jsonl");

    std::string base = "score --benchmark " + dir + "/benchmark.jsonl --submission " + dir +
                       "/submission.jsonl --compare-with " + dir +
                       "/rival.jsonl --class superiority --metric balanced_accuracy "
                       "--resamples 1000 --seed 7 --out ";
    CHECK(run_cli(base + dir + "/score1.json", dir + "/stdout1.txt") == 0);
    CHECK(run_cli(base + dir + "/score2.json", dir + "/stdout2.txt") == 0);
    CHECK(slurp(dir + "/score1.json") == slurp(dir + "/score2.json"));
    CHECK(slurp(dir + "/score1.json").find("\"significant\"") != std::string::npos);
}

TEST_CASE("cli rejects corrupt submissions with exit code 3") {
    if (cli_bin().empty()) return;
    std::string dir = temp_dir("cli_reject");
    ChallengeWindow window = ChallengeWindow::from_dates(Date{2025, 2, 1}, Date{2025, 5, 1});
    auto questions = generate_questions(tpa_trial(), window.cutoff);
    std::vector<BenchmarkAnswer> answers;
    BenchmarkAnswer a;
    a.question_id = questions[0].question_id;
    a.label = 0;
    a.verification = AnswerVerification::verified;
    answers.push_back(a);
    DeconDecision d;
    d.nct_id = "NCT03335839";
    d.status = DeconStatus::accepted;
    d.cutoff = window.cutoff;
    BenchmarkArtifact artifact = assemble_benchmark({d}, questions, answers, window);
    write_benchmark_file(artifact, dir + "/benchmark.jsonl", true);
    {
        std::ofstream out(dir + "/bad.jsonl");
        out << R"({"participant_id":"x","submitted_at":"2025-01-01"})" << "\n";
        out << R"({"question_id":"q_does_not_exist","answer":0})" << "\n";
    }
    CHECK(run_cli("score --benchmark " + dir + "/benchmark.jsonl --submission " + dir +
                  "/bad.jsonl") == 3);
}

TEST_CASE("cli decon replays recorded fixtures into the oracle decisions") {
    if (cli_bin().empty()) return;
    std::string dir = temp_dir("cli_decon");
    Date cutoff{2025, 1, 31};

    ScriptedScenario scenario;
    // accepted: post-cutoff results only
    scenario.trials["NCT00000001"].brief_title = "Accepted trial";
    scenario.trials["NCT00000001"].screening_urls = {"https://s.example/1"};
    scenario.trials["NCT00000001"].after_urls["llm_search_a"] = {
        {"https://after.example/1", "2025-02-20", "readout"}};
    // excluded: pre-cutoff llm evidence
    scenario.trials["NCT00000002"].brief_title = "Contaminated trial";
    scenario.trials["NCT00000002"].screening_urls = {"https://s.example/2"};
    scenario.trials["NCT00000002"].before_urls["llm_search_b"] = {
        {"https://before.example/2", "2025-01-10", "early readout"}};
    // excluded: nothing anywhere

    std::vector<TrialRecord> pool = {make_trial("NCT00000001", "Accepted trial"),
                                     make_trial("NCT00000002", "Contaminated trial"),
                                     make_trial("NCT00000003", "Silent trial")};
    {
        std::ofstream out(dir + "/trials.jsonl");
        for (const auto& t : pool) out << to_canonical_json(t).dump() << "\n";
    }

    // record the world once through the library path
    std::string fixture_dir = dir + "/fixtures";
    {
        auto recorder = std::make_shared<RecordingTransport>(
            std::make_shared<ScriptedTransport>(scenario), fixture_dir);
        RunConfig config = RunConfig::defaults();
        config.cache_dir = dir + "/record_cache";
        config.today = test_today();
        DocumentCache cache(config.cache_dir);
        AssetStore assets(AssetStore::default_root());
        SearchEngine engine(recorder, cache, assets, config);
        run_decontamination(pool, cutoff, engine, 2);
        recorder->save();
    }

    // the cli replays those fixtures with no live backends configured
    int code = run_cli("--replay " + fixture_dir + " --cache-dir " + dir +
                           "/cli_cache --today " + test_today().to_iso() +
                           " decon --trials " + dir + "/trials.jsonl --cutoff 2025-01-31" +
                           " --decisions " + dir + "/decisions.jsonl --report " + dir +
                           "/report.json",
                       dir + "/stdout.txt");
    CHECK(code == 0);

    std::map<std::string, std::string> status_by_id;
    std::ifstream in(dir + "/decisions.jsonl");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        status_by_id[j.at("nct_id")] = j.at("status");
    }
    CHECK(status_by_id["NCT00000001"] == "accepted");
    CHECK(status_by_id["NCT00000002"] == "excluded_pre_cutoff_llm");
    CHECK(status_by_id["NCT00000003"] == "excluded_no_results_anywhere");
    CHECK(slurp(dir + "/report.json").find("\"prompt_version\"") != std::string::npos);
}

TEST_CASE("cli chains every stage from one recorded fixture set") {
    if (cli_bin().empty()) return;
    std::string dir = temp_dir("cli_chain");
    ChallengeWindow window = ChallengeWindow::from_dates(Date{2025, 2, 1}, Date{2025, 5, 1});

    // world: one trial reports results inside the window, one already had
    // results before the cutoff, one never reports anything
    ScriptedScenario scenario;
    TrialRecord good = tpa_trial();
    scenario.trials[good.nct_id].brief_title = good.brief_title;
    scenario.trials[good.nct_id].screening_urls = {"https://s.example/good"};
    scenario.trials[good.nct_id].after_urls["llm_search_a"] = {
        {"https://after.example/good", "2025-03-02", "readout"}};
    scenario.trials[good.nct_id].web_urls = {"https://evidence.example.com/good"};
    scenario.add_page_with_date("https://evidence.example.com/good", "2025-03-10",
                                good.nct_id + " readout: primary endpoint analysis reported.");

    TrialRecord tainted = v116_trial();
    scenario.trials[tainted.nct_id].brief_title = tainted.brief_title;
    scenario.trials[tainted.nct_id].screening_urls = {"https://s.example/tainted"};
    scenario.trials[tainted.nct_id].before_urls["llm_search_a"] = {
        {"https://before.example/tainted", "2025-01-05", "early readout"}};

    TrialRecord silent = make_trial("NCT00000009", "Silent trial");

    scenario.judge_rules.emplace_back("choose which answer option",
                                      "decision: b\nreason: endpoint not met per [1]");
    scenario.judge_rules.emplace_back("support the selected answer",
                                      "decision: yes\nreason: supported");
    scenario.judge_rules.emplace_back("determine which option is correct",
                                      "decision: c\nreason: no difference");

    std::vector<TrialRecord> pool = {good, tainted, silent};
    {
        std::ofstream out(dir + "/trials.jsonl");
        for (const auto& t : pool) out << to_canonical_json(t).dump() << "\n";
    }

    // record every request the staged cli runs will issue (requests are
    // content-addressed, so issuing a superset in any order is enough)
    std::string fixture_dir = dir + "/fixtures";
    {
        auto recorder = std::make_shared<RecordingTransport>(
            std::make_shared<ScriptedTransport>(scenario), fixture_dir);
        RunConfig config = RunConfig::defaults();
        config.cache_dir = dir + "/record_cache";
        config.today = test_today();
        DocumentCache cache(config.cache_dir);
        AssetStore assets(AssetStore::default_root());
        SearchEngine engine(recorder, cache, assets, config);
        build_candidate_pool(pool, window, engine, 2);
        DeconRun run = run_decontamination(pool, window.cutoff, engine, 2);
        std::map<std::string, TrialRecord> by_id;
        std::map<std::string, std::vector<EvidenceDocument>> evidence;
        std::vector<BenchmarkQuestion> questions;
        for (const auto& t : run.accepted) {
            by_id[t.nct_id] = t;
            evidence[t.nct_id] = gather_window_evidence(t, window, engine);
            for (auto& q : generate_questions(t, window.cutoff)) questions.push_back(q);
        }
        JudgeClient judge(recorder, assets, config.prompt_version);
        generate_answers(questions, by_id, evidence, judge, 2);
        recorder->save();
    }

    std::string base = "--replay " + fixture_dir + " --today " + test_today().to_iso() + " ";
    auto fresh_cache = [&](const std::string& tag) {
        return " --cache-dir " + dir + "/cache_" + tag + " ";
    };

    CHECK(run_cli(base + fresh_cache("pool") + "pool --trials " + dir +
                      "/trials.jsonl --window 2025-02-01:2025-05-01 --questions " + dir +
                      "/questions.jsonl --report " + dir + "/exclusions.json",
                  dir + "/pool_out.txt") == 0);
    CHECK(run_cli(base + fresh_cache("decon") + "decon --trials " + dir +
                      "/trials.jsonl --cutoff 2025-01-31 --decisions " + dir +
                      "/decisions.jsonl --accepted " + dir + "/accepted.jsonl --report " + dir +
                      "/decon_report.json",
                  dir + "/decon_out.txt") == 0);
    CHECK(run_cli(base + fresh_cache("answers") + "answers --questions " + dir +
                      "/questions.jsonl --trials " + dir + "/trials.jsonl --decisions " + dir +
                      "/decisions.jsonl --window 2025-02-01:2025-05-01 --out " + dir +
                      "/answers.jsonl --report " + dir + "/answers_report.json",
                  dir + "/answers_out.txt") == 0);
    CHECK(run_cli("assemble --questions " + dir + "/questions.jsonl --answers " + dir +
                      "/answers.jsonl --decisions " + dir +
                      "/decisions.jsonl --window 2025-02-01:2025-05-01 --out " + dir +
                      "/benchmark.jsonl --pool-out " + dir + "/released_pool.jsonl",
                  dir + "/assemble_out.txt") == 0);

    BenchmarkArtifact released = read_benchmark_file(dir + "/benchmark.jsonl");
    CHECK(released.stats.unique_trials == 1);  // only the clean trial survives
    REQUIRE(released.stats.total_questions > 0);
    for (const auto& q : released.questions) CHECK(q.nct_id == good.nct_id);

    // score a submission answering every released question with option 1
    {
        Submission s;
        s.participant_id = "chained";
        s.submitted_at = "2025-01-20T00:00:00Z";
        for (const auto& q : released.questions) s.predictions[q.question_id] = 1;
        s.write(dir + "/submission.jsonl");
    }
    CHECK(run_cli("score --benchmark " + dir + "/benchmark.jsonl --submission " + dir +
                      "/submission.jsonl --out " + dir + "/score.json",
                  dir + "/score_out.txt") == 0);
    CHECK(run_cli("leaderboard --benchmark " + dir + "/benchmark.jsonl --submissions " + dir +
                      "/submission.jsonl --class superiority --metric balanced_accuracy --text " +
                      dir + "/lb.txt",
                  dir + "/lb_out.txt") == 0);
    CHECK(slurp(dir + "/lb.txt").find("chained") != std::string::npos);

    // the exclusion report itemizes the pre-window screen removal
    auto exclusions = nlohmann::json::parse(slurp(dir + "/exclusions.json"));
    CHECK(exclusions.at("excluded_pre_window_results").get<int>() == 1);
}

TEST_CASE("cli cache inspect reports an empty cache") {
    if (cli_bin().empty()) return;
    std::string dir = temp_dir("cli_cache");
    CHECK(run_cli("--cache-dir " + dir + "/cache cache inspect", dir + "/out.txt") == 0);
    CHECK(slurp(dir + "/out.txt").find("cache entries: 0") != std::string::npos);
}
