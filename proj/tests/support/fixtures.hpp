#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>

#include "ctopen/cache.hpp"
#include "ctopen/config.hpp"
#include "ctopen/registry.hpp"
#include "ctopen/search.hpp"
#include "support/scripted_backends.hpp"

namespace ctopen::testing {

inline std::string temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto path = std::filesystem::temp_directory_path() /
                ("ctopen_" + tag + "_" + std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
    return path.string();
}

inline Date test_today() { return Date{2026, 12, 31}; }

inline TrialRecord make_trial(const std::string& nct_id, const std::string& title) {
    TrialRecord t;
    t.nct_id = nct_id;
    t.brief_title = title;
    t.description = "A randomized controlled study.";
    t.study_start_date = Date{2021, 5, 14};
    t.enrollment = 120;
    t.phase = Phase::phase3;
    t.allocation = Allocation::randomized;
    t.intervention_model = InterventionModel::parallel;
    t.masking = Masking::double_blind;
    t.primary_purpose = PrimaryPurpose::treatment;
    t.arms.push_back({"Treatment", ArmType::experimental, "Active drug", {"Drug X"}});
    t.arms.push_back({"Placebo", ArmType::placebo_comparator, "Matching placebo", {"Placebo"}});
    OutcomeMeasure m;
    m.title = "Overall response rate";
    m.measure_class = MeasureClass::primary;
    m.time_frame_text = "12 weeks";
    m.time_frame_days = 84;
    t.outcome_measures.push_back(std::move(m));
    t.conditions = {"Condition A"};
    t.sponsors = {{"Example Pharma", "industry"}};
    t.location_countries = {"United States"};
    t.eligibility_text = "Adults aged 18 to 75 with confirmed diagnosis.";
    t.intervention_types = {InterventionType::drug};
    return t;
}

inline TrialRecord tpa_trial() {
    TrialRecord t = make_trial("NCT03335839", "Intracoronary tPA Following Primary PCI in STEMI");
    t.description = "Evaluates low-dose intracoronary tenecteplase after primary PCI.";
    t.study_start_date = Date{2018, 3, 1};
    t.enrollment = 200;
    t.arms.clear();
    t.arms.push_back({"Intracoronary tPA 10 mg", ArmType::experimental,
                      "Intracoronary tPA 10 mg after primary PCI", {"tPA"}});
    t.arms.push_back({"Placebo", ArmType::placebo_comparator, "Matching placebo infusion",
                      {"Placebo"}});
    t.outcome_measures.clear();
    OutcomeMeasure m;
    m.title = "Post-procedural MBG 0/1 or Distal Embolization";
    m.measure_class = MeasureClass::primary;
    m.time_frame_text = "30 days";
    m.time_frame_days = normalize_time_frame("30 days");
    t.outcome_measures.push_back(std::move(m));
    t.conditions = {"ST Elevation Myocardial Infarction"};
    return t;
}

inline TrialRecord v116_trial() {
    TrialRecord t = make_trial("NCT06177912", "V116 Pneumococcal Vaccine in Adults");
    t.description = "Compares the 21-valent conjugate vaccine with PPSV23.";
    t.study_start_date = Date{2023, 12, 11};
    t.enrollment = 300;
    t.arms.clear();
    t.arms.push_back({"V116", ArmType::experimental, "Pneumococcal 21-valent conjugate vaccine",
                      {"V116"}});
    t.arms.push_back({"PPSV23", ArmType::active_comparator,
                      "Pneumococcal 23-valent polysaccharide vaccine", {"PPSV23"}});
    t.outcome_measures.clear();
    OutcomeMeasure m;
    m.title = "Percentage of participants with solicited systemic AEs";
    m.measure_class = MeasureClass::primary;
    m.time_frame_text = "Up to 5 days";
    m.time_frame_days = normalize_time_frame("Up to 5 days");
    t.outcome_measures.push_back(std::move(m));
    t.conditions = {"Pneumococcal Infections"};
    t.intervention_types = {InterventionType::biological, InterventionType::drug};
    return t;
}

inline TrialRecord nerandomilast_trial() {
    TrialRecord t = make_trial("NCT05321082", "BI 1015550 in Progressive Pulmonary Fibrosis");
    t.description = "Dose-ranging study of nerandomilast in progressive fibrosing ILD.";
    t.aliases = {"BI 1015550", "Nerandomilast"};
    t.study_start_date = Date{2022, 9, 1};
    t.enrollment = 1178;
    t.arms.clear();
    t.arms.push_back({"BI 1015550 low dose", ArmType::experimental, "Nerandomilast low dose",
                      {"BI 1015550"}});
    t.arms.push_back({"BI 1015550 high dose", ArmType::experimental, "Nerandomilast high dose",
                      {"BI 1015550"}});
    t.outcome_measures.clear();
    OutcomeMeasure m;
    m.title =
        "Time to first occurrence of composite endpoint: acute ILD exacerbation, "
        "hospitalization for respiratory cause, or death";
    m.measure_class = MeasureClass::secondary;
    m.time_frame_text = "Up to 31 months";
    m.time_frame_days = normalize_time_frame("Up to 31 months");
    t.outcome_measures.push_back(std::move(m));
    t.conditions = {"Progressive Pulmonary Fibrosis"};
    return t;
}

// full engine over a scripted transport; optional logging wrapper for call
// assertions
struct EngineHarness {
    std::string cache_dir;
    std::shared_ptr<ScriptedTransport> scripted;
    std::shared_ptr<CallLoggingTransport> log;
    RunConfig config;
    AssetStore assets;
    std::unique_ptr<DocumentCache> cache;
    std::unique_ptr<SearchEngine> engine;

    explicit EngineHarness(ScriptedScenario scenario, int concurrency = 2)
        : cache_dir(temp_dir("cache")),
          scripted(std::make_shared<ScriptedTransport>(std::move(scenario))),
          log(std::make_shared<CallLoggingTransport>(scripted)),
          config(RunConfig::defaults()),
          assets(AssetStore::default_root()) {
        config.concurrency = concurrency;
        config.cache_dir = cache_dir;
        config.today = test_today();
        cache = std::make_unique<DocumentCache>(cache_dir);
        engine = std::make_unique<SearchEngine>(log, *cache, assets, config);
    }
};

}  // namespace ctopen::testing
