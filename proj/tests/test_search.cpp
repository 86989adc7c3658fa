#include "doctest.h"

#include "ctopen/live_transport.hpp"
#include "ctopen/search.hpp"
#include "ctopen/sha256.hpp"
#include "support/fixtures.hpp"

using namespace ctopen;
using namespace ctopen::testing;

namespace {

Clock clock_2026() { return Clock{test_today()}; }

ScriptedScenario one_trial_scenario() {
    ScriptedScenario scenario;
    auto& script = scenario.trials["NCT00000001"];
    script.brief_title = "Drug X in Condition A";
    script.screening_urls = {"https://news.example.com/first-result"};
    return scenario;
}

TrialRecord trial_one() { return make_trial("NCT00000001", "Drug X in Condition A"); }

}  // namespace

TEST_CASE("url list normalization handles structured and free-form output") {
    // JSON array of strings
    auto urls = SearchEngine::normalize_url_list(R"(["https://a.example/x","https://b.example/y"])");
    CHECK(urls == std::vector<std::string>{"https://a.example/x", "https://b.example/y"});

    // structured object notation
    urls = SearchEngine::normalize_url_list(
        R"([{"url":"https://a.example/x","title":"t"},{"url":"https://b.example/y"}])");
    CHECK(urls.size() == 2);

    // python-style literal list
    urls = SearchEngine::normalize_url_list("['https://a.example/x', 'https://b.example/y']");
    CHECK(urls == std::vector<std::string>{"https://a.example/x", "https://b.example/y"});

    // free text with embedded urls, one malformed
    urls = SearchEngine::normalize_url_list(
        "I found results at https://a.example/x and also htp:/broken.example plus "
        "(https://b.example/y).");
    CHECK(urls == std::vector<std::string>{"https://a.example/x", "https://b.example/y"});

    // no-result phrasing yields an empty list
    CHECK(SearchEngine::normalize_url_list("no results found").empty());

    // duplicates collapse, order preserved
    urls = SearchEngine::normalize_url_list(
        "https://a.example/x\nhttps://b.example/y\nhttps://a.example/x");
    CHECK(urls == std::vector<std::string>{"https://a.example/x", "https://b.example/y"});
}

TEST_CASE("round-2 output parses into per-url details") {
    std::string output =
        "URL: https://a.example/x\n"
        "Date: 2025-02-10\n"
        "Results: pCR rate 61% vs 42%, p=0.003.\n"
        "\n"
        "URL: https://b.example/y\n"
        "Date: March 1, 2025\n"
        "Results: Hazard ratio 0.71.\n"
        "Additional safety findings were consistent.\n";
    auto details = SearchEngine::parse_url_details(output, clock_2026());
    REQUIRE(details.size() == 2);
    CHECK(details["https://a.example/x"].publication_date == Date{2025, 2, 10});
    CHECK(details["https://b.example/y"].publication_date == Date{2025, 3, 1});
    CHECK(details["https://b.example/y"].results_summary ==
          "Hazard ratio 0.71.\nAdditional safety findings were consistent.");

    // an out-of-range date is kept with the date absent and flagged
    auto flagged = SearchEngine::parse_url_details(
        "URL: https://c.example/z\nDate: 1989-01-01\nResults: old data\n", clock_2026());
    REQUIRE(flagged.count("https://c.example/z"));
    CHECK_FALSE(flagged["https://c.example/z"].publication_date.has_value());
    CHECK(flagged["https://c.example/z"].date_flagged);

    // "none" is absent but not flagged
    auto none = SearchEngine::parse_url_details(
        "URL: https://d.example/w\nDate: none\nResults: none\n", clock_2026());
    CHECK_FALSE(none["https://d.example/w"].publication_date.has_value());
    CHECK_FALSE(none["https://d.example/w"].date_flagged);
}

TEST_CASE("screening search returns a single document when limited to one") {
    auto scenario = one_trial_scenario();
    scenario.trials["NCT00000001"].screening_urls = {"https://a.example/1", "https://a.example/2"};
    EngineHarness h(scenario);
    auto docs = h.engine->search(trial_one(), DateWindow::all(), SearchMode::llm_search_a, 1);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].url == "https://a.example/1");
}

TEST_CASE("llm window filtering is end-exclusive and drops undated documents") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.before_urls["llm_search_a"] = {
        {"https://ok.example/in-window", "2025-01-30", "met endpoint"},
        {"https://boundary.example/on-cutoff", "2025-01-31", "met endpoint"},
        {"https://undated.example/no-date", "", "met endpoint"},
    };
    EngineHarness h(scenario);
    auto docs = h.engine->search(trial_one(), DateWindow::before(Date{2025, 1, 31}),
                                 SearchMode::llm_search_a, std::nullopt);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].url == "https://ok.example/in-window");
    CHECK(docs[0].publication_date == Date{2025, 1, 30});
    // the undated document lands in the audit list
    auto undated = h.engine->undated_urls();
    CHECK(std::find(undated.begin(), undated.end(), "https://undated.example/no-date") !=
          undated.end());
}

TEST_CASE("an empty url list skips the round-2 backend call entirely") {
    EngineHarness h(one_trial_scenario());
    auto details = h.engine->llm_extract_url_details({}, SearchMode::llm_search_a);
    CHECK(details.empty());
    CHECK(h.log->count_for("llm_search_a") == 0);
}

TEST_CASE("three qualifying and two disqualified documents return exactly three") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.before_urls["llm_search_a"] = {
        {"https://q.example/1", "2025-01-10", "r1"},
        {"https://q.example/2", "2025-01-12", "r2"},
        {"https://bad.example/after-cutoff", "2025-02-02", "r"},
        {"https://q.example/3", "2025-01-14", "r3"},
        {"https://bad.example/undated", "", "r"},
    };
    EngineHarness h(scenario);
    auto docs = h.engine->search(trial_one(), DateWindow::before(Date{2025, 1, 31}),
                                 SearchMode::llm_search_a, std::nullopt);
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].url == "https://q.example/1");
    CHECK(docs[1].url == "https://q.example/2");
    CHECK(docs[2].url == "https://q.example/3");
}

TEST_CASE("each query configuration is capped at 100 candidate urls") {
    auto scenario = one_trial_scenario();
    for (int i = 0; i < 120; ++i)
        scenario.trials["NCT00000001"].web_urls.push_back(
            "https://many.example/" + std::to_string(i));
    EngineHarness h(scenario);
    TrialRecord trial = trial_one();
    auto candidates = h.engine->web_index_search({trial.nct_id},
                                                 DateWindow::before(Date{2025, 1, 31}), &trial);
    // the same 120 urls are served for both freshness settings; the per-
    // configuration cap keeps only the first 100
    CHECK(candidates.size() == 100);
}

TEST_CASE("web index search unions query/freshness combinations with provenance") {
    auto scenario = one_trial_scenario();
    scenario.trials["NCT00000001"].web_urls = {"https://w.example/a", "https://w.example/b"};
    EngineHarness h(scenario);
    TrialRecord trial = trial_one();
    auto queries = h.engine->rewrite_queries(trial);
    REQUIRE(queries.size() == 3);
    CHECK(queries[0] == trial.brief_title);
    CHECK(queries[1] == "NCT00000001");
    CHECK(queries[2] == "results readout NCT00000001");

    auto candidates = h.engine->web_index_search(queries, DateWindow::before(Date{2025, 1, 31}),
                                                 &trial);
    REQUIRE(candidates.size() == 2);
    // every matching query records provenance on the shared url
    CHECK(candidates[0].queries.size() == 3);
    // six configurations issued: 3 queries x freshness on/off
    CHECK(h.log->count_for("web_index") == 6);
}

TEST_CASE("query rewriting falls back to two deterministic queries on judge failure") {
    auto scenario = one_trial_scenario();
    scenario.fail_query_rewrite = true;
    EngineHarness h(scenario);
    TrialRecord trial = trial_one();
    auto queries = h.engine->rewrite_queries(trial);
    REQUIRE(queries.size() == 2);
    CHECK(queries[0] == trial.brief_title);
    CHECK(queries[1] == trial.nct_id);
    REQUIRE_FALSE(h.engine->warnings().empty());
}

TEST_CASE("second fetch of a url is served from cache with zero network calls") {
    auto scenario = one_trial_scenario();
    scenario.add_page_with_date("https://w.example/a", "2025-01-15", "NCT00000001 results");
    EngineHarness h(scenario);
    auto first = h.engine->fetch_document("https://w.example/a");
    CHECK_FALSE(first.from_cache);
    auto fetches_after_first = h.log->count_for("fetch.direct");
    auto second = h.engine->fetch_document("https://w.example/a");
    CHECK(second.from_cache);
    CHECK(h.log->count_for("fetch.direct") == fetches_after_first);
    CHECK(second.entry.extracted_text == first.entry.extracted_text);
    CHECK(second.entry.publication_date == Date{2025, 1, 15});
}

TEST_CASE("pdf urls run through the ocr client; recorded transcript is the text") {
    auto scenario = one_trial_scenario();
    std::string pdf_bytes = "%PDF-1.4 fake-binary-payload";
    scenario.pages["https://journal.example.com/paper.pdf"] = pdf_bytes;
    scenario.ocr_texts[Sha256::hex(pdf_bytes)] =
        "Published March 3, 2024. The trial met its primary endpoint.";
    EngineHarness h(scenario);
    auto fetched = h.engine->fetch_document("https://journal.example.com/paper.pdf");
    CHECK(fetched.entry.content_kind == "pdf");
    CHECK(fetched.entry.extracted_text ==
          "Published March 3, 2024. The trial met its primary endpoint.");
    CHECK(fetched.entry.publication_date == Date{2024, 3, 3});
}

TEST_CASE("ocr failure marks the document unextractable but keeps the bytes") {
    auto scenario = one_trial_scenario();
    scenario.pages["https://journal.example.com/other.pdf"] = "%PDF-1.4 other";
    EngineHarness h(scenario);
    auto fetched = h.engine->fetch_document("https://journal.example.com/other.pdf");
    CHECK(fetched.entry.extracted_text.empty());
    CHECK(fetched.entry.failure.find("ocr failed") != std::string::npos);
    CHECK(h.cache->contains("https://journal.example.com/other.pdf"));
}

TEST_CASE("blocked direct fetch falls back to the scraping proxy") {
    auto scenario = one_trial_scenario();
    scenario.pages["https://walled.example.com/article"] =
        "<html><body><p>Access denied. Please complete the captcha.</p></body></html>";
    scenario.proxy_pages["https://walled.example.com/article"] =
        page_with_jsonld_date("2025-01-10", "Real article content about the trial results.");
    EngineHarness h(scenario);
    auto fetched = h.engine->fetch_document("https://walled.example.com/article");
    CHECK_FALSE(fetched.entry.fetch_failed);
    CHECK(fetched.entry.extracted_text.find("Real article content") != std::string::npos);
    CHECK(fetched.entry.publication_date == Date{2025, 1, 10});
}

TEST_CASE("unreachable urls record a fetch error without aborting") {
    auto scenario = one_trial_scenario();
    EngineHarness h(scenario);
    auto fetched = h.engine->fetch_document("https://gone.example.com/404");
    CHECK(fetched.entry.fetch_failed);
    CHECK_FALSE(fetched.entry.failure.empty());
}

TEST_CASE("paper repository urls route to the database client") {
    auto scenario = one_trial_scenario();
    scenario.repo_articles["https://pubmed.ncbi.nlm.nih.gov/12345678/"] = {
        {"url", "https://pubmed.ncbi.nlm.nih.gov/12345678/"},
        {"title", "Trial results"},
        {"text", "Full text of the article."},
        {"date", "2025-01-12"}};
    EngineHarness h(scenario);
    auto fetched = h.engine->fetch_document("https://pubmed.ncbi.nlm.nih.gov/12345678/");
    CHECK(fetched.entry.content_kind == "text");
    CHECK(fetched.entry.publication_date == Date{2025, 1, 12});
    CHECK(fetched.entry.extracted_text.find("Full text") != std::string::npos);
    CHECK(h.log->count_for("fetch.direct") == 0);
}

TEST_CASE("web index mode verifies identity and results before returning") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.web_urls = {"https://good.example.com/results", "https://other.example.com/wrong-trial",
                       "https://launch.example.com/announce"};
    scenario.add_page_with_date("https://good.example.com/results", "2025-01-10",
                                "NCT00000001 readout: endpoint met with significance.");
    scenario.add_page_with_date("https://other.example.com/wrong-trial", "2025-01-11",
                                "A different study entirely, marker WRONGTRIAL.");
    scenario.add_page_with_date("https://launch.example.com/announce", "2025-01-12",
                                "Enrollment has opened, marker LAUNCHONLY.");
    // wrong trial fails round 1; the launch page passes round 1 but fails
    // round 2 ("Results are any mention" appears only in the round-2 prompt)
    scenario.judge_rules.emplace_back("WRONGTRIAL",
                                      "decision: no\nmatched:\nreason: different trial");
    scenario.judge_rules.emplace_back("Results are any mention&&LAUNCHONLY",
                                      "decision: no\nreason: launch_only");
    EngineHarness h(scenario);

    TrialRecord trial = trial_one();
    auto docs = h.engine->search(trial, DateWindow::before(Date{2025, 1, 31}),
                                 SearchMode::web_index, std::nullopt);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].url == "https://good.example.com/results");
    CHECK(docs[0].identity_verified == true);
    CHECK(docs[0].results_verified == true);
    REQUIRE(docs[0].publication_date.has_value());
    CHECK(*docs[0].publication_date < Date{2025, 1, 31});
}

TEST_CASE("database lookup filters on the source-reported date, end exclusive") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.db_articles["pubmed"] = {
        {{"url", "https://pubmed.ncbi.nlm.nih.gov/111/"},
         {"title", "In-window article"},
         {"text", "Trial NCT00000001 results: endpoint met."},
         {"date", "2025-01-20"}},
        {{"url", "https://pubmed.ncbi.nlm.nih.gov/222/"},
         {"title", "Boundary article"},
         {"text", "Trial NCT00000001 results on the boundary."},
         {"date", "2025-01-31"}}};
    script.db_articles["biorxiv"] = {
        {{"url", "https://www.biorxiv.org/content/333"},
         {"title", "Preprint"},
         {"text", "Preprint results for NCT00000001."},
         {"date", "2025-01-25"}}};
    EngineHarness h(scenario);
    TrialRecord trial = trial_one();
    auto docs = h.engine->database_lookup("NCT00000001", DateWindow::before(Date{2025, 1, 31}),
                                          trial);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].url == "https://pubmed.ncbi.nlm.nih.gov/111/");
    CHECK(docs[1].url == "https://www.biorxiv.org/content/333");
}

TEST_CASE("per-source database failures return partial results with a warning") {
    auto scenario = one_trial_scenario();
    scenario.trials["NCT00000001"].db_articles["pmc"] = {
        {{"url", "https://pmc.ncbi.nlm.nih.gov/articles/PMC1/"},
         {"title", "Article"},
         {"text", "Results for NCT00000001."},
         {"date", "2025-01-20"}}};
    scenario.failing_backends.insert("db.pubmed");
    EngineHarness h(scenario);
    auto docs = h.engine->database_lookup("NCT00000001", DateWindow::before(Date{2025, 1, 31}),
                                          trial_one());
    REQUIRE(docs.size() == 1);
    bool warned = false;
    for (const auto& w : h.engine->warnings())
        if (w.backend_id == "db.pubmed") warned = true;
    CHECK(warned);
}

TEST_CASE("limit results are a prefix of larger-limit results") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.before_urls["llm_search_a"] = {
        {"https://a.example/1", "2025-01-10", "r1"},
        {"https://a.example/2", "2025-01-11", "r2"},
        {"https://a.example/3", "2025-01-12", "r3"},
    };
    EngineHarness h(scenario);
    TrialRecord trial = trial_one();
    DateWindow window = DateWindow::before(Date{2025, 1, 31});
    auto one = h.engine->search(trial, window, SearchMode::llm_search_a, 1);
    auto two = h.engine->search(trial, window, SearchMode::llm_search_a, 2);
    auto all = h.engine->search(trial, window, SearchMode::llm_search_a, std::nullopt);
    REQUIRE(one.size() == 1);
    REQUIRE(two.size() == 2);
    REQUIRE(all.size() == 3);
    CHECK(one[0].url == two[0].url);
    CHECK(two[0].url == all[0].url);
    CHECK(two[1].url == all[1].url);
}

TEST_CASE("disabling one backend never changes another backend's results") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.db_articles["pubmed"] = {
        {{"url", "https://pubmed.ncbi.nlm.nih.gov/111/"},
         {"title", "Article"},
         {"text", "Results for NCT00000001."},
         {"date", "2025-01-20"}}};
    TrialRecord trial = trial_one();
    DateWindow window = DateWindow::before(Date{2025, 1, 31});

    EngineHarness healthy(scenario);
    auto baseline = healthy.engine->search(trial, window, SearchMode::literature_database,
                                           std::nullopt);

    auto broken = scenario;
    broken.failing_backends.insert("web_index");
    broken.failing_backends.insert("llm_search_a");
    EngineHarness degraded(broken);
    auto still = degraded.engine->search(trial, window, SearchMode::literature_database,
                                         std::nullopt);
    REQUIRE(baseline.size() == still.size());
    for (std::size_t i = 0; i < baseline.size(); ++i) CHECK(baseline[i].url == still[i].url);
}

TEST_CASE("recorded engine runs replay byte-identically with no live access") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.web_urls = {"https://good.example.com/results"};
    scenario.add_page_with_date("https://good.example.com/results", "2025-01-10",
                                "NCT00000001 readout: endpoint met.");
    TrialRecord trial = trial_one();
    DateWindow window = DateWindow::before(Date{2025, 1, 31});
    std::string fixture_dir = temp_dir("replay_fixture");

    nlohmann::json recorded_docs = nlohmann::json::array();
    {
        auto scripted = std::make_shared<ScriptedTransport>(scenario);
        auto recorder = std::make_shared<RecordingTransport>(scripted, fixture_dir);
        RunConfig config = RunConfig::defaults();
        config.cache_dir = temp_dir("cache_record");
        config.today = test_today();
        DocumentCache cache(config.cache_dir);
        AssetStore assets(AssetStore::default_root());
        SearchEngine engine(recorder, cache, assets, config);
        for (const auto& d : engine.search(trial, window, SearchMode::web_index, std::nullopt))
            recorded_docs.push_back(d.to_json(true));
        recorder->save();
    }

    auto replay = std::make_shared<ReplayTransport>(FixtureStore::load(fixture_dir));
    RunConfig config = RunConfig::defaults();
    config.cache_dir = temp_dir("cache_replay");
    config.today = test_today();
    DocumentCache cache(config.cache_dir);
    AssetStore assets(AssetStore::default_root());
    SearchEngine engine(replay, cache, assets, config);
    nlohmann::json replayed_docs = nlohmann::json::array();
    for (const auto& d : engine.search(trial, window, SearchMode::web_index, std::nullopt))
        replayed_docs.push_back(d.to_json(true));

    CHECK(recorded_docs.dump() == replayed_docs.dump());
}

TEST_CASE("warm-cache results match cold-cache results") {
    auto scenario = one_trial_scenario();
    auto& script = scenario.trials["NCT00000001"];
    script.web_urls = {"https://good.example.com/results"};
    scenario.add_page_with_date("https://good.example.com/results", "2025-01-10",
                                "NCT00000001 readout: endpoint met.");
    EngineHarness h(scenario);
    TrialRecord trial = trial_one();
    DateWindow window = DateWindow::before(Date{2025, 1, 31});

    auto cold = h.engine->search(trial, window, SearchMode::web_index, std::nullopt);
    auto warm = h.engine->search(trial, window, SearchMode::web_index, std::nullopt);
    REQUIRE(cold.size() == warm.size());
    for (std::size_t i = 0; i < cold.size(); ++i) {
        CHECK(cold[i].to_json(true).dump() == warm[i].to_json(true).dump());
    }
}

TEST_CASE("pdf and repository url detection") {
    CHECK(SearchEngine::is_pdf_url("https://x.example/paper.pdf"));
    CHECK(SearchEngine::is_pdf_url("https://x.example/paper.PDF?download=1"));
    CHECK_FALSE(SearchEngine::is_pdf_url("https://x.example/paper.pdf.html"));
    CHECK(SearchEngine::is_paper_repository_url("https://pubmed.ncbi.nlm.nih.gov/1/"));
    CHECK(SearchEngine::is_paper_repository_url("https://www.biorxiv.org/content/10.1101/x"));
    CHECK(SearchEngine::is_paper_repository_url("https://www.medrxiv.org/content/10.1101/x"));
    CHECK_FALSE(SearchEngine::is_paper_repository_url("https://news.example.com/story"));
}
