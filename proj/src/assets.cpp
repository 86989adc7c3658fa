#include "ctopen/assets.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctopen {

AssetStore::AssetStore(std::string root_dir) : root_(std::move(root_dir)) {}

std::string AssetStore::default_root() {
    if (const char* env = std::getenv("CTOPEN_ASSETS_DIR"); env && *env) return env;
#ifdef CTOPEN_SOURCE_ASSETS_DIR
    return CTOPEN_SOURCE_ASSETS_DIR;
#else
    return "assets";
#endif
}

std::string AssetStore::read_text(const std::string& relative_path) const {
    std::string path = root_ + "/" + relative_path;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("asset not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json AssetStore::read_json(const std::string& relative_path) const {
    return nlohmann::json::parse(read_text(relative_path));
}

std::string AssetStore::prompt(const std::string& version, const std::string& name) const {
    return read_text("prompts/" + version + "/" + name + ".txt");
}

std::string render_prompt(const std::string& template_text,
                          const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(template_text.size());
    size_t pos = 0;
    while (pos < template_text.size()) {
        size_t open = template_text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(template_text, pos, std::string::npos);
            break;
        }
        size_t close = template_text.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(template_text, pos, std::string::npos);
            break;
        }
        out.append(template_text, pos, open - pos);
        std::string key = template_text.substr(open + 2, close - open - 2);
        auto it = values.find(key);
        if (it != values.end()) {
            out += it->second;
        } else {
            out.append(template_text, open, close + 2 - open);
        }
        pos = close + 2;
    }
    return out;
}

}  // namespace ctopen
