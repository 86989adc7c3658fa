#include "doctest.h"

#include "ctopen/verification.hpp"
#include "support/fixtures.hpp"

using namespace ctopen;
using namespace ctopen::testing;

namespace {

JudgeClient make_judge(ScriptedScenario scenario) {
    auto transport = std::make_shared<ScriptedTransport>(std::move(scenario));
    return JudgeClient(transport, AssetStore(AssetStore::default_root()), "v1");
}

}  // namespace

TEST_CASE("identity verdict parses decision, dimensions and reason") {
    ScriptedScenario scenario;
    JudgeClient judge = make_judge(scenario);

    // triangulation without a registry identifier still matches
    auto verdict = verify_same_trial("NCT ID: NCT00000001\nBrief title: T",
                                     "Same drug, sponsor, design and enrollment.", judge);
    CHECK(verdict.same_trial);
    CHECK(verdict.matched_dimensions ==
          std::vector<std::string>{"identifiers", "treatments", "sponsors"});
    CHECK_FALSE(verdict.rejection_reason.has_value());
}

TEST_CASE("conflicting registry id rejects identity") {
    ScriptedScenario scenario;
    scenario.judge_rules.emplace_back(
        "NCT99999999",
        "decision: no\nmatched: treatments\nreason: conflicting registry identifier");
    JudgeClient judge = make_judge(scenario);
    auto verdict = verify_same_trial("NCT ID: NCT00000001",
                                     "This study (NCT99999999) reported...", judge);
    CHECK_FALSE(verdict.same_trial);
    REQUIRE(verdict.rejection_reason.has_value());
    CHECK(*verdict.rejection_reason == "conflicting registry identifier");
}

TEST_CASE("fewer treatments and smaller enrollment still match as a subset") {
    ScriptedScenario scenario;
    scenario.judge_rules.emplace_back(
        "single-arm cohort of 80 participants",
        "decision: yes\nmatched: treatments, sponsors, study_design\nreason: plausible subset");
    JudgeClient judge = make_judge(scenario);
    auto verdict = verify_same_trial(
        "NCT ID: NCT00000001\nEnrollment: 200\nArms: Drug X; Placebo",
        "Investigators reported on a single-arm cohort of 80 participants receiving Drug X.",
        judge);
    CHECK(verdict.same_trial);
}

TEST_CASE("results verdict maps rejection reasons") {
    ScriptedScenario scenario;
    scenario.judge_rules.emplace_back("enrollment opening",
                                      "decision: no\nreason: launch_only");
    scenario.judge_rules.emplace_back("earlier-phase trial",
                                      "decision: no\nreason: related_trial_only");
    scenario.judge_rules.emplace_back("primary endpoint was met",
                                      "decision: yes\nreason: results_reported");
    JudgeClient judge = make_judge(scenario);

    auto launch = verify_reports_results("T", "Press release: enrollment opening for trial.", judge);
    CHECK_FALSE(launch.reports_results);
    CHECK(launch.rejection_reason == ResultsRejection::launch_only);

    auto related = verify_reports_results("T", "The earlier-phase trial showed efficacy.", judge);
    CHECK_FALSE(related.reports_results);
    CHECK(related.rejection_reason == ResultsRejection::related_trial_only);

    auto positive = verify_reports_results("T", "The primary endpoint was met.", judge);
    CHECK(positive.reports_results);
    CHECK_FALSE(positive.rejection_reason.has_value());
}

TEST_CASE("malformed judge output triggers exactly one re-ask") {
    ScriptedScenario scenario;
    // the re-ask prompt carries the format reminder; only then comply
    scenario.judge_rules.emplace_back("Reply strictly in the required format",
                                      "decision: yes\nreason: ok");
    scenario.judge_rules.emplace_back("discusses the same exact clinical trial",
                                      "sure, it matches!");
    auto transport = std::make_shared<CallLoggingTransport>(
        std::make_shared<ScriptedTransport>(scenario));
    JudgeClient judge(transport, AssetStore(AssetStore::default_root()), "v1");

    auto verdict = verify_same_trial("trial", "document", judge);
    CHECK(verdict.same_trial);
    CHECK(transport->count_for("judge") == 2);
}

TEST_CASE("persistently malformed output is a hard contract failure") {
    ScriptedScenario scenario;
    scenario.judge_rules.emplace_back("discusses the same exact clinical trial",
                                      "no usable decision line here");
    JudgeClient judge = make_judge(scenario);
    CHECK_THROWS_AS(verify_same_trial("trial", "document", judge), JudgeContractError);
}

TEST_CASE("replayed transcripts give identical verdicts") {
    std::string dir = temp_dir("judge_replay");
    {
        ScriptedScenario scenario;
        auto recorder = std::make_shared<RecordingTransport>(
            std::make_shared<ScriptedTransport>(scenario), dir);
        JudgeClient judge(recorder, AssetStore(AssetStore::default_root()), "v1");
        auto verdict = verify_same_trial("trial text", "document text", judge);
        CHECK(verdict.same_trial);
        recorder->save();
    }
    auto replay = std::make_shared<ReplayTransport>(FixtureStore::load(dir));
    JudgeClient judge(replay, AssetStore(AssetStore::default_root()), "v1");
    auto a = verify_same_trial("trial text", "document text", judge);
    auto b = verify_same_trial("trial text", "document text", judge);
    CHECK(a.same_trial == b.same_trial);
    CHECK(a.matched_dimensions == b.matched_dimensions);
}
