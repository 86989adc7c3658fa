#include "ctopen/verification.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ctopen {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// value of the first "key:" line, if any
std::optional<std::string> contract_line(const std::string& raw, const std::string& key) {
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        std::string lowered = lower(line);
        std::string prefix = key + ":";
        size_t at = lowered.find(prefix);
        if (at != std::string::npos && lowered.find_first_not_of(" \t") == at) {
            return trim(line.substr(at + prefix.size()));
        }
    }
    return std::nullopt;
}

std::string first_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else
            break;
    }
    return out;
}

const std::set<std::string>& known_dimensions() {
    static const std::set<std::string> d = {"identifiers", "treatments", "study_design",
                                            "sponsors",    "phase",      "locations",
                                            "enrollment",  "eligibility"};
    return d;
}

}  // namespace

std::string to_string(ResultsRejection r) {
    switch (r) {
        case ResultsRejection::related_trial_only: return "related_trial_only";
        case ResultsRejection::launch_only: return "launch_only";
        case ResultsRejection::other: return "other";
    }
    return "other";
}

JudgeClient::JudgeClient(std::shared_ptr<Transport> transport, AssetStore assets,
                         std::string prompt_version, std::string backend_id)
    : transport_(std::move(transport)),
      assets_(std::move(assets)),
      prompt_version_(std::move(prompt_version)),
      backend_id_(std::move(backend_id)) {}

std::string JudgeClient::call_raw(const std::string& prompt) const {
    nlohmann::json request;
    request["op"] = "judge";
    request["prompt"] = prompt;
    std::string payload = transport_->call(backend_id_, request);
    // live endpoints may wrap the text; fixtures usually store it raw
    nlohmann::json j = nlohmann::json::parse(payload, nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("text")) return j["text"].get<std::string>();
    return payload;
}

JudgeClient::Reply JudgeClient::ask(const std::string& prompt_name,
                                    const std::map<std::string, std::string>& values,
                                    const std::set<std::string>& allowed_decisions) const {
    std::string prompt = render_prompt(assets_.prompt(prompt_version_, prompt_name), values);

    auto attempt = [&](const std::string& text) -> std::optional<Reply> {
        std::string raw = call_raw(text);
        auto decision_line = contract_line(raw, "decision");
        if (!decision_line) return std::nullopt;
        std::string decision = first_token(*decision_line);
        if (!allowed_decisions.count(decision)) return std::nullopt;
        Reply reply;
        reply.decision = decision;
        reply.reason = contract_line(raw, "reason").value_or("");
        reply.matched = contract_line(raw, "matched").value_or("");
        reply.raw = raw;
        return reply;
    };

    if (auto reply = attempt(prompt)) return *reply;
    std::string reminder = prompt +
                           "\n\nYour previous reply did not follow the required format. "
                           "Reply strictly in the required format.";
    if (auto reply = attempt(reminder)) return *reply;
    throw JudgeContractError("judge output violated the contract twice for prompt " +
                             prompt_name);
}

std::string JudgeClient::ask_freeform(const std::string& prompt_name,
                                      const std::map<std::string, std::string>& values) const {
    std::string prompt = render_prompt(assets_.prompt(prompt_version_, prompt_name), values);
    std::string raw = call_raw(prompt);
    // first non-empty line
    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty()) return t;
    }
    return "";
}

IdentityVerdict verify_same_trial(const std::string& trial_text,
                                  const std::string& document_text, const JudgeClient& judge) {
    auto reply = judge.ask("trial_identity",
                           {{"trial_text", trial_text}, {"document_text", document_text}},
                           {"yes", "no"});
    IdentityVerdict verdict;
    verdict.same_trial = reply.decision == "yes";
    std::istringstream in(reply.matched);
    std::string dim;
    while (std::getline(in, dim, ',')) {
        std::string key = lower(trim(dim));
        if (known_dimensions().count(key)) verdict.matched_dimensions.push_back(key);
    }
    if (!verdict.same_trial && !reply.reason.empty()) verdict.rejection_reason = reply.reason;
    return verdict;
}

ResultsVerdict verify_reports_results(const std::string& trial_text,
                                      const std::string& document_text,
                                      const JudgeClient& judge) {
    auto reply = judge.ask("results_verification",
                           {{"trial_text", trial_text}, {"document_text", document_text}},
                           {"yes", "no"});
    ResultsVerdict verdict;
    verdict.reports_results = reply.decision == "yes";
    if (!verdict.reports_results) {
        std::string reason = first_token(reply.reason);
        if (reason == "related_trial_only")
            verdict.rejection_reason = ResultsRejection::related_trial_only;
        else if (reason == "launch_only")
            verdict.rejection_reason = ResultsRejection::launch_only;
        else
            verdict.rejection_reason = ResultsRejection::other;
    }
    return verdict;
}

}  // namespace ctopen
