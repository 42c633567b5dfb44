#include "taxoforge/http.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "taxoforge/errors.hpp"
#include "taxoforge/url.hpp"

namespace taxoforge {
namespace {

constexpr const char* kUserAgent = "taxoforge/1.0";

struct HopResult {
    int status = 0;
    std::string body;
    std::string location;
};

// One redirect hop, with 5xx/timeout retry and exponential backoff.
HopResult fetch_hop(const Url& u, const HttpPolicy& policy) {
    for (int attempt = 0;; ++attempt) {
        httplib::Client cli(u.origin());
        cli.set_connection_timeout(policy.timeout_ms / 1000, (policy.timeout_ms % 1000) * 1000);
        cli.set_read_timeout(policy.timeout_ms / 1000, (policy.timeout_ms % 1000) * 1000);
        cli.set_follow_location(false);
        cli.set_decompress(true);

        httplib::Headers headers = {{"User-Agent", kUserAgent},
                                    {"Accept-Encoding", "gzip"}};
        auto res = cli.Get(u.target(), headers);

        const bool transient_failure =
            !res || (res->status >= 500 && res->status <= 599);
        if (transient_failure && attempt < policy.retries_5xx) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(policy.backoff_base_ms * (1LL << attempt)));
            continue;
        }
        if (!res) throw Timeout("request failed: " + u.str());

        HopResult out;
        out.status = res->status;
        out.body = res->body;
        if (res->has_header("Location")) out.location = res->get_header_value("Location");
        return out;
    }
}

}  // namespace

std::vector<unsigned char> download(const std::string& url, const HttpPolicy& policy) {
    auto u = parse_url(url);
    if (!u) throw Error("not an absolute http(s) URL: " + url);

    for (int hops = 0;; ++hops) {
        HopResult res = fetch_hop(*u, policy);
        if (res.status == 301 || res.status == 302) {
            if (hops >= policy.max_redirects)
                throw TooManyRedirects("too many redirects fetching " + url);
            auto next = parse_url(resolve_reference(u->str(), res.location));
            if (!next) throw Error("bad redirect location from " + u->str());
            u = next;
            continue;
        }
        if (res.status >= 200 && res.status < 300)
            return {res.body.begin(), res.body.end()};
        throw HttpError(res.status, u->str());
    }
}

std::string download_text(const std::string& url, const HttpPolicy& policy) {
    auto bytes = download(url, policy);
    return {bytes.begin(), bytes.end()};
}

}  // namespace taxoforge
