#pragma once

#include <optional>
#include <string>

namespace taxoforge {

struct Url {
    std::string scheme;     // "http" / "https"
    std::string host;
    int port = 0;           // 0 = scheme default
    std::string path;       // always begins with '/' (empty path normalized)
    std::string query;      // without leading '?', may be empty

    std::string origin() const;    // scheme://host[:port]
    std::string target() const;    // path[?query]
    std::string str() const;
};

std::optional<Url> parse_url(const std::string& s);

// RFC 3986 reference resolution (absolute, network-path, absolute-path and
// relative references; fragments stripped).
std::string resolve_reference(const std::string& base, const std::string& ref);

}  // namespace taxoforge
