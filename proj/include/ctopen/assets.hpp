#pragma once

#include <map>
#include <string>

#include "json.hpp"

namespace ctopen {

// Versioned on-disk assets: prompt templates, the filter registry and the
// site-domain date hint table. Prompt files are byte-stable per version so
// recorded transcripts stay replayable across releases.
class AssetStore {
  public:
    explicit AssetStore(std::string root_dir = default_root());

    // CTOPEN_ASSETS_DIR when set, otherwise the checked-out assets tree.
    static std::string default_root();

    std::string read_text(const std::string& relative_path) const;
    nlohmann::json read_json(const std::string& relative_path) const;
    std::string prompt(const std::string& version, const std::string& name) const;

    const std::string& root() const { return root_; }

  private:
    std::string root_;
};

// Substitutes {{key}} placeholders; unknown placeholders are left intact so
// a stale template is visible in transcripts rather than silently blank.
std::string render_prompt(const std::string& template_text,
                          const std::map<std::string, std::string>& values);

}  // namespace ctopen
