#pragma once

#include <map>
#include <string>
#include <vector>

namespace ctopen {

enum class BlockKind { heading, paragraph, list_item, table_cell, other };

// One rendered text run, in document order. Heading and list-item text keeps
// a Markdown structural marker ("## ", "- "); dom_path is the slash-joined
// element chain from the root down to the enclosing block element.
struct ContentBlock {
    std::string text;
    std::string dom_path;
    BlockKind kind = BlockKind::other;
    int heading_level = 0;  // 1-6 when kind == heading

    bool operator==(const ContentBlock&) const = default;
};

struct BlockParseResult {
    std::vector<ContentBlock> blocks;
    std::string diagnostic;  // non-empty when the markup yielded nothing renderable
};

// Depth-first traversal of (possibly malformed) page markup into a flat block
// list. Scripting, styling and non-rendered elements are dropped.
BlockParseResult dom_to_blocks(const std::string& markup);

struct HtmlTag {
    std::string name;
    std::map<std::string, std::string> attributes;  // names lowercased
    std::string inner_html;                         // raw, empty for void elements
};

// All occurrences of one element, in document order. Matching close tags are
// found by depth counting; unclosed tags run to end of input.
std::vector<HtmlTag> find_all_tags(const std::string& markup, const std::string& tag_name);

// Visible text of a markup fragment: tags removed, entities decoded,
// whitespace collapsed.
std::string strip_tags(const std::string& fragment);

std::string decode_entities(const std::string& text);

std::string to_string(BlockKind kind);

}  // namespace ctopen
