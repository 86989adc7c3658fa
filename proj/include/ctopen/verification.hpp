#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctopen/assets.hpp"
#include "ctopen/transport.hpp"

namespace ctopen {

struct IdentityVerdict {
    bool same_trial = false;
    std::vector<std::string> matched_dimensions;  // identifiers, treatments, study_design,
                                                  // sponsors, phase, locations, enrollment,
                                                  // eligibility
    std::optional<std::string> rejection_reason;
};

enum class ResultsRejection { related_trial_only, launch_only, other };

struct ResultsVerdict {
    bool reports_results = false;
    std::optional<ResultsRejection> rejection_reason;
};

std::string to_string(ResultsRejection r);

// Malformed judge output after the single permitted re-ask.
class JudgeContractError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Wraps the judge backend behind the versioned prompt assets and the output
// contract (a single-token decision line plus free-text rationale); one
// re-ask on contract violation, then hard failure.
class JudgeClient {
  public:
    JudgeClient(std::shared_ptr<Transport> transport, AssetStore assets,
                std::string prompt_version, std::string backend_id = "judge");

    struct Reply {
        std::string decision;
        std::string reason;
        std::string matched;
        std::string raw;
    };

    Reply ask(const std::string& prompt_name,
              const std::map<std::string, std::string>& values,
              const std::set<std::string>& allowed_decisions) const;

    // single-line free-text reply (query rewriting)
    std::string ask_freeform(const std::string& prompt_name,
                             const std::map<std::string, std::string>& values) const;

    const std::string& prompt_version() const { return prompt_version_; }

  private:
    std::string call_raw(const std::string& prompt) const;

    std::shared_ptr<Transport> transport_;
    AssetStore assets_;
    std::string prompt_version_;
    std::string backend_id_;
};

// Round 1: is the document about the same exact trial (or a strict subset)?
// trial_text must be the date-free protocol flattening.
IdentityVerdict verify_same_trial(const std::string& trial_text,
                                  const std::string& document_text, const JudgeClient& judge);

// Round 2: does the matched document report results for the trial? Only
// run for pairs whose identity verdict is positive.
ResultsVerdict verify_reports_results(const std::string& trial_text,
                                      const std::string& document_text,
                                      const JudgeClient& judge);

}  // namespace ctopen
