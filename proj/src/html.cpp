#include "taxoforge/html.hpp"

#include <cctype>
#include <unordered_set>

#include "taxoforge/url.hpp"

namespace taxoforge {
namespace {

bool iequal_at(std::string_view s, size_t pos, std::string_view word) {
    if (pos + word.size() > s.size()) return false;
    for (size_t i = 0; i < word.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != word[i]) return false;
    }
    return true;
}

// Scans attributes of a tag body (between the tag name and '>') for src.
// Handles quoted and unquoted values.
std::string find_src(std::string_view tag) {
    size_t i = 0;
    while (i < tag.size()) {
        while (i < tag.size() && (std::isspace(static_cast<unsigned char>(tag[i])) || tag[i] == '/'))
            ++i;
        size_t name_start = i;
        while (i < tag.size() && tag[i] != '=' && tag[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(tag[i])))
            ++i;
        std::string_view name = tag.substr(name_start, i - name_start);
        while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;

        std::string value;
        bool has_value = false;
        if (i < tag.size() && tag[i] == '=') {
            ++i;
            has_value = true;
            while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
            if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
                char quote = tag[i++];
                size_t end = tag.find(quote, i);
                if (end == std::string_view::npos) return {};
                value = std::string(tag.substr(i, end - i));
                i = end + 1;
            } else {
                size_t start = i;
                while (i < tag.size() && !std::isspace(static_cast<unsigned char>(tag[i])) &&
                       tag[i] != '>')
                    ++i;
                value = std::string(tag.substr(start, i - start));
            }
        }

        if (name.size() == 3 && iequal_at(name, 0, "src") && has_value && !value.empty())
            return value;
        if (name.empty() && !has_value) break;
    }
    return {};
}

}  // namespace

std::vector<std::string> parse_image_urls(std::string_view html, const std::string& base_url) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;

    size_t i = 0;
    while ((i = html.find('<', i)) != std::string_view::npos) {
        if (iequal_at(html, i, "<!--")) {
            size_t end = html.find("-->", i + 4);
            if (end == std::string_view::npos) break;
            i = end + 3;
            continue;
        }
        if (!iequal_at(html, i, "<img") ||
            (i + 4 < html.size() && !std::isspace(static_cast<unsigned char>(html[i + 4])) &&
             html[i + 4] != '>' && html[i + 4] != '/')) {
            ++i;
            continue;
        }
        size_t end = html.find('>', i);
        if (end == std::string_view::npos) break;
        std::string src = find_src(html.substr(i + 4, end - i - 4));
        i = end + 1;
        if (src.empty()) continue;

        std::string resolved = resolve_reference(base_url, src);
        if (seen.insert(resolved).second) out.push_back(std::move(resolved));
    }
    return out;
}

}  // namespace taxoforge
