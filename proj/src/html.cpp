#include "ctopen/html.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace ctopen {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

const std::set<std::string>& void_elements() {
    static const std::set<std::string> v = {"area",  "base", "br",    "col",  "embed",
                                            "hr",    "img",  "input", "link", "meta",
                                            "param", "source", "track", "wbr"};
    return v;
}

// Content of these elements is never rendered.
const std::set<std::string>& suppressed_elements() {
    static const std::set<std::string> v = {"script",   "style", "noscript", "template",
                                            "head",     "title", "svg",      "iframe",
                                            "object",   "embed", "select",   "option",
                                            "textarea"};
    return v;
}

// Raw-text elements: body runs to the matching close tag, no nesting.
const std::set<std::string>& raw_text_elements() {
    static const std::set<std::string> v = {"script", "style", "textarea", "title"};
    return v;
}

const std::set<std::string>& block_elements() {
    static const std::set<std::string> v = {
        "address", "article", "aside",   "blockquote", "body",   "dd",      "div",
        "dl",      "dt",      "figure",  "figcaption", "footer", "form",    "h1",
        "h2",      "h3",      "h4",      "h5",         "h6",     "header",  "hr",
        "html",    "li",      "main",    "nav",        "ol",     "p",       "pre",
        "section", "table",   "tbody",   "td",         "tfoot",  "th",      "thead",
        "tr",      "ul"};
    return v;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp <= 0x7f) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7ff) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp <= 0xffff) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp <= 0x10ffff) {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

std::string collapse_whitespace(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // trims leading whitespace
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(c));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

struct Token {
    enum Kind { open_tag, close_tag, text } kind;
    std::string name;                               // tags
    std::map<std::string, std::string> attributes;  // open tags
    bool self_closing = false;
    std::string body;  // text tokens
    size_t tag_end = 0;
};

class Tokenizer {
  public:
    explicit Tokenizer(const std::string& html) : html_(html) {}

    bool next(Token& token) {
        if (pos_ >= html_.size()) return false;
        if (html_[pos_] != '<') {
            size_t end = html_.find('<', pos_);
            if (end == std::string::npos) end = html_.size();
            token.kind = Token::text;
            token.body = html_.substr(pos_, end - pos_);
            pos_ = end;
            return true;
        }
        // comments, doctype, CDATA
        if (html_.compare(pos_, 4, "<!--") == 0) {
            size_t end = html_.find("-->", pos_ + 4);
            pos_ = end == std::string::npos ? html_.size() : end + 3;
            return next(token);
        }
        if (html_.compare(pos_, 9, "<![CDATA[") == 0) {
            size_t end = html_.find("]]>", pos_ + 9);
            pos_ = end == std::string::npos ? html_.size() : end + 3;
            return next(token);
        }
        if (pos_ + 1 < html_.size() && (html_[pos_ + 1] == '!' || html_[pos_ + 1] == '?')) {
            size_t end = html_.find('>', pos_);
            pos_ = end == std::string::npos ? html_.size() : end + 1;
            return next(token);
        }
        if (pos_ + 1 < html_.size() && html_[pos_ + 1] == '/') {
            size_t start = pos_ + 2;
            size_t end = html_.find('>', start);
            if (end == std::string::npos) {
                pos_ = html_.size();
                return false;
            }
            token.kind = Token::close_tag;
            token.name = lower(collapse_whitespace(html_.substr(start, end - start)));
            pos_ = end + 1;
            return true;
        }
        // stray '<' that is not a tag: emit as text
        if (pos_ + 1 >= html_.size() || !std::isalpha(static_cast<unsigned char>(html_[pos_ + 1]))) {
            token.kind = Token::text;
            token.body = "<";
            ++pos_;
            return true;
        }
        return parse_open_tag(token);
    }

    // for raw-text elements: everything up to "</name"
    std::string consume_raw_until_close(const std::string& name) {
        std::string needle = "</" + name;
        size_t start = pos_;
        size_t p = pos_;
        while (p < html_.size()) {
            p = html_.find("</", p);
            if (p == std::string::npos) {
                pos_ = html_.size();
                return html_.substr(start);
            }
            std::string candidate = lower(html_.substr(p, needle.size()));
            if (candidate == needle) {
                std::string body = html_.substr(start, p - start);
                size_t end = html_.find('>', p);
                pos_ = end == std::string::npos ? html_.size() : end + 1;
                return body;
            }
            p += 2;
        }
        pos_ = html_.size();
        return html_.substr(start);
    }

    size_t position() const { return pos_; }
    void seek(size_t pos) { pos_ = pos; }

  private:
    bool parse_open_tag(Token& token) {
        size_t p = pos_ + 1;
        std::string name;
        while (p < html_.size() &&
               (std::isalnum(static_cast<unsigned char>(html_[p])) || html_[p] == '-' ||
                html_[p] == '_' || html_[p] == ':')) {
            name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(html_[p]))));
            ++p;
        }
        token.kind = Token::open_tag;
        token.name = name;
        token.attributes.clear();
        token.self_closing = false;

        while (p < html_.size() && html_[p] != '>') {
            while (p < html_.size() && std::isspace(static_cast<unsigned char>(html_[p]))) ++p;
            if (p < html_.size() && html_[p] == '/') {
                token.self_closing = true;
                ++p;
                continue;
            }
            if (p >= html_.size() || html_[p] == '>') break;
            std::string attr_name;
            while (p < html_.size() && html_[p] != '=' && html_[p] != '>' && html_[p] != '/' &&
                   !std::isspace(static_cast<unsigned char>(html_[p]))) {
                attr_name.push_back(
                    static_cast<char>(std::tolower(static_cast<unsigned char>(html_[p]))));
                ++p;
            }
            std::string attr_value;
            while (p < html_.size() && std::isspace(static_cast<unsigned char>(html_[p]))) ++p;
            if (p < html_.size() && html_[p] == '=') {
                ++p;
                while (p < html_.size() && std::isspace(static_cast<unsigned char>(html_[p]))) ++p;
                if (p < html_.size() && (html_[p] == '"' || html_[p] == '\'')) {
                    char quote = html_[p++];
                    size_t end = html_.find(quote, p);
                    if (end == std::string::npos) end = html_.size();
                    attr_value = html_.substr(p, end - p);
                    p = end < html_.size() ? end + 1 : end;
                } else {
                    while (p < html_.size() && html_[p] != '>' &&
                           !std::isspace(static_cast<unsigned char>(html_[p]))) {
                        attr_value.push_back(html_[p]);
                        ++p;
                    }
                }
            }
            if (!attr_name.empty()) token.attributes[attr_name] = decode_entities(attr_value);
        }
        pos_ = p < html_.size() ? p + 1 : html_.size();
        token.tag_end = pos_;
        return true;
    }

    const std::string& html_;
    size_t pos_ = 0;
};

BlockKind kind_for(const std::string& element, int& heading_level) {
    heading_level = 0;
    if (element.size() == 2 && element[0] == 'h' && element[1] >= '1' && element[1] <= '6') {
        heading_level = element[1] - '0';
        return BlockKind::heading;
    }
    if (element == "p") return BlockKind::paragraph;
    if (element == "li" || element == "dt" || element == "dd") return BlockKind::list_item;
    if (element == "td" || element == "th") return BlockKind::table_cell;
    return BlockKind::other;
}

}  // namespace

std::string decode_entities(const std::string& text) {
    static const std::vector<std::pair<std::string, std::string>> named = {
        {"&amp;", "&"},  {"&lt;", "<"},    {"&gt;", ">"},    {"&quot;", "\""},
        {"&apos;", "'"}, {"&nbsp;", " "},  {"&ndash;", "\xE2\x80\x93"},
        {"&mdash;", "\xE2\x80\x94"},       {"&hellip;", "\xE2\x80\xA6"},
        {"&copy;", "\xC2\xA9"},            {"&reg;", "\xC2\xAE"},
        {"&rsquo;", "\xE2\x80\x99"},       {"&lsquo;", "\xE2\x80\x98"},
        {"&rdquo;", "\xE2\x80\x9D"},       {"&ldquo;", "\xE2\x80\x9C"}};
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        bool matched = false;
        for (const auto& [entity, repl] : named) {
            if (text.compare(i, entity.size(), entity) == 0) {
                out += repl;
                i += entity.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (i + 2 < text.size() && text[i + 1] == '#') {
            size_t j = i + 2;
            bool hex = j < text.size() && (text[j] == 'x' || text[j] == 'X');
            if (hex) ++j;
            unsigned long cp = 0;
            size_t digits_start = j;
            while (j < text.size() &&
                   (hex ? std::isxdigit(static_cast<unsigned char>(text[j]))
                        : std::isdigit(static_cast<unsigned char>(text[j])))) {
                cp = cp * (hex ? 16 : 10) +
                     (std::isdigit(static_cast<unsigned char>(text[j]))
                          ? static_cast<unsigned long>(text[j] - '0')
                          : static_cast<unsigned long>(std::tolower(text[j]) - 'a' + 10));
                ++j;
            }
            if (j > digits_start && j < text.size() && text[j] == ';') {
                append_utf8(out, cp);
                i = j + 1;
                continue;
            }
        }
        out.push_back(text[i++]);
    }
    return out;
}

BlockParseResult dom_to_blocks(const std::string& markup) {
    BlockParseResult result;
    Tokenizer tokenizer(markup);
    Token token;

    std::vector<std::string> stack;
    int suppress_depth = 0;
    std::string pending_text;
    std::string pending_path;
    std::string pending_element;

    auto current_path = [&]() {
        // path ends at the innermost block element; inline descendants are
        // not part of a block's identity
        size_t cut = stack.size();
        for (size_t i = stack.size(); i > 0; --i) {
            if (block_elements().count(stack[i - 1])) {
                cut = i;
                break;
            }
            cut = i - 1;
        }
        if (cut == 0) cut = stack.size();
        std::string path;
        for (size_t i = 0; i < cut; ++i) {
            if (i) path.push_back('/');
            path += stack[i];
        }
        return path;
    };

    auto innermost_block = [&]() -> std::string {
        for (size_t i = stack.size(); i > 0; --i) {
            if (block_elements().count(stack[i - 1])) return stack[i - 1];
        }
        return "";
    };

    auto flush = [&]() {
        std::string text = collapse_whitespace(pending_text);
        pending_text.clear();
        if (text.empty()) return;
        ContentBlock block;
        int level = 0;
        block.kind = kind_for(pending_element, level);
        block.heading_level = level;
        block.dom_path = pending_path;
        if (block.kind == BlockKind::heading) {
            block.text = std::string(static_cast<size_t>(level), '#') + " " + text;
        } else if (block.kind == BlockKind::list_item && pending_element == "li") {
            block.text = "- " + text;
        } else {
            block.text = text;
        }
        result.blocks.push_back(std::move(block));
    };

    while (tokenizer.next(token)) {
        switch (token.kind) {
            case Token::text: {
                if (suppress_depth > 0) break;
                std::string decoded = decode_entities(token.body);
                if (collapse_whitespace(decoded).empty()) {
                    if (!pending_text.empty()) pending_text += " ";
                    break;
                }
                if (collapse_whitespace(pending_text).empty()) {
                    pending_text.clear();
                    pending_path = current_path();
                    pending_element = innermost_block();
                }
                pending_text += decoded;
                break;
            }
            case Token::open_tag: {
                const std::string& name = token.name;
                if (raw_text_elements().count(name) && !token.self_closing) {
                    tokenizer.consume_raw_until_close(name);
                    break;
                }
                if (void_elements().count(name)) {
                    if (name == "br" || name == "hr") {
                        if (name == "hr") flush();
                        else if (!pending_text.empty()) pending_text += " ";
                    }
                    break;
                }
                if (block_elements().count(name)) flush();
                if (token.self_closing) break;
                stack.push_back(name);
                if (suppressed_elements().count(name)) ++suppress_depth;
                break;
            }
            case Token::close_tag: {
                const std::string& name = token.name;
                if (block_elements().count(name)) flush();
                // pop to the nearest matching open tag; tolerate stray closes
                for (size_t i = stack.size(); i > 0; --i) {
                    if (stack[i - 1] == name) {
                        for (size_t k = stack.size(); k > i - 1; --k) {
                            if (suppressed_elements().count(stack[k - 1])) --suppress_depth;
                            stack.pop_back();
                        }
                        break;
                    }
                }
                break;
            }
        }
    }
    flush();

    if (result.blocks.empty()) {
        result.diagnostic = markup.empty() ? "empty markup" : "no renderable content";
    }
    return result;
}

std::vector<HtmlTag> find_all_tags(const std::string& markup, const std::string& tag_name) {
    std::vector<HtmlTag> out;
    std::string want = lower(tag_name);
    Tokenizer tokenizer(markup);
    Token token;
    while (tokenizer.next(token)) {
        if (token.kind != Token::open_tag || token.name != want) continue;
        HtmlTag tag;
        tag.name = token.name;
        tag.attributes = token.attributes;
        if (token.self_closing || void_elements().count(want)) {
            out.push_back(std::move(tag));
            continue;
        }
        if (raw_text_elements().count(want)) {
            tag.inner_html = tokenizer.consume_raw_until_close(want);
            out.push_back(std::move(tag));
            continue;
        }
        size_t body_start = token.tag_end;
        size_t body_end = body_start;
        int depth = 1;
        Token inner;
        while (depth > 0 && tokenizer.next(inner)) {
            if (inner.kind == Token::open_tag && inner.name == want && !inner.self_closing)
                ++depth;
            else if (inner.kind == Token::close_tag && inner.name == want) {
                --depth;
                if (depth == 0) break;
            }
            body_end = tokenizer.position();
        }
        if (depth == 0) {
            // back up over the close tag we just consumed
            size_t close = markup.rfind("</", tokenizer.position());
            body_end = close == std::string::npos ? tokenizer.position() : close;
        } else {
            body_end = markup.size();
        }
        tag.inner_html = markup.substr(body_start, body_end - body_start);
        out.push_back(std::move(tag));
    }
    return out;
}

std::string strip_tags(const std::string& fragment) {
    Tokenizer tokenizer(fragment);
    Token token;
    std::string text;
    while (tokenizer.next(token)) {
        if (token.kind == Token::text) {
            text += decode_entities(token.body);
            text += " ";
        } else if (token.kind == Token::open_tag && raw_text_elements().count(token.name) &&
                   !token.self_closing) {
            tokenizer.consume_raw_until_close(token.name);
        }
    }
    std::string out;
    bool in_space = true;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(c));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::heading: return "heading";
        case BlockKind::paragraph: return "paragraph";
        case BlockKind::list_item: return "list_item";
        case BlockKind::table_cell: return "table_cell";
        case BlockKind::other: return "other";
    }
    return "other";
}

}  // namespace ctopen
