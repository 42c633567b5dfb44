#include "taxoforge/url.hpp"

namespace taxoforge {
namespace {

std::string remove_dot_segments(std::string input) {
    std::string out;
    while (!input.empty()) {
        if (input.rfind("../", 0) == 0) {
            input.erase(0, 3);
        } else if (input.rfind("./", 0) == 0) {
            input.erase(0, 2);
        } else if (input.rfind("/./", 0) == 0) {
            input.replace(0, 3, "/");
        } else if (input == "/.") {
            input = "/";
        } else if (input.rfind("/../", 0) == 0 || input == "/..") {
            input.replace(0, input == "/.." ? 3 : 4, "/");
            auto pos = out.find_last_of('/');
            out.erase(pos == std::string::npos ? 0 : pos);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            auto next = input.find('/', 1);
            out += input.substr(0, next);
            input.erase(0, next == std::string::npos ? input.size() : next);
        }
    }
    return out;
}

std::string merge_paths(const Url& base, const std::string& ref_path) {
    if (base.path.empty()) return "/" + ref_path;
    auto pos = base.path.find_last_of('/');
    return base.path.substr(0, pos + 1) + ref_path;
}

void split_path_query(const std::string& s, std::string& path, std::string& query) {
    auto q = s.find('?');
    if (q == std::string::npos) {
        path = s;
        query.clear();
    } else {
        path = s.substr(0, q);
        query = s.substr(q + 1);
    }
}

}  // namespace

std::string Url::origin() const {
    std::string s = scheme + "://" + host;
    if (port != 0) s += ":" + std::to_string(port);
    return s;
}

std::string Url::target() const {
    std::string s = path.empty() ? "/" : path;
    if (!query.empty()) s += "?" + query;
    return s;
}

std::string Url::str() const { return origin() + target(); }

std::optional<Url> parse_url(const std::string& s) {
    Url u;
    std::string rest;
    if (s.rfind("http://", 0) == 0) {
        u.scheme = "http";
        rest = s.substr(7);
    } else if (s.rfind("https://", 0) == 0) {
        u.scheme = "https";
        rest = s.substr(8);
    } else {
        return std::nullopt;
    }

    auto slash = rest.find_first_of("/?");
    std::string authority = rest.substr(0, slash);
    std::string tail = slash == std::string::npos ? "" : rest.substr(slash);
    if (!tail.empty() && tail[0] == '?') tail = "/" + tail;

    auto colon = authority.find(':');
    if (colon != std::string::npos) {
        u.host = authority.substr(0, colon);
        try {
            u.port = std::stoi(authority.substr(colon + 1));
        } catch (...) {
            return std::nullopt;
        }
    } else {
        u.host = authority;
    }
    if (u.host.empty()) return std::nullopt;

    // Drop any fragment.
    auto hash = tail.find('#');
    if (hash != std::string::npos) tail.erase(hash);
    split_path_query(tail.empty() ? "/" : tail, u.path, u.query);
    return u;
}

std::string resolve_reference(const std::string& base, const std::string& ref) {
    if (ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0) {
        auto u = parse_url(ref);
        if (!u) return ref;
        u->path = remove_dot_segments(u->path);
        return u->str();
    }

    auto b = parse_url(base);
    if (!b) return ref;

    std::string r = ref;
    auto hash = r.find('#');
    if (hash != std::string::npos) r.erase(hash);

    Url out = *b;
    if (r.rfind("//", 0) == 0) {
        auto u = parse_url(b->scheme + ":" + r);
        if (!u) return ref;
        out = *u;
    } else if (!r.empty() && r[0] == '/') {
        split_path_query(r, out.path, out.query);
    } else if (r.empty()) {
        // keep base path and query
    } else if (r[0] == '?') {
        out.query = r.substr(1);
    } else {
        std::string path, query;
        split_path_query(r, path, query);
        out.path = merge_paths(*b, path);
        out.query = query;
    }
    out.path = remove_dot_segments(out.path);
    return out.str();
}

}  // namespace taxoforge
