#pragma once

#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace taxoforge::testing {

// Serves a fixture taxonomy tree over the same wire shape as the live
// species API: /v1/species/{key}, /{key}/children with limit/offset paging,
// and /{key}/speciesProfiles.
//
// Fixture file format:
//   { "taxa": [{"key":1,"scientificName":"Aves","rank":"CLASS","parent":null}, ...],
//     "profiles": {"7": [{"extinct": true}, {}]} }
class MockApi {
public:
    explicit MockApi(nlohmann::json fixture) : fixture_(std::move(fixture)) {
        server_.Get(R"(/v1/species/(\d+)/children)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        children(req, res);
                    });
        server_.Get(R"(/v1/species/(\d+)/speciesProfiles)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        profiles(req, res);
                    });
        server_.Get(R"(/v1/species/(\d+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        record(req, res);
                    });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockApi() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/species/";
    }

    int requests_served() const { return requests_; }

private:
    nlohmann::json find_taxon(long long key) const {
        for (const auto& t : fixture_.at("taxa"))
            if (t.at("key").get<long long>() == key) return t;
        return nullptr;
    }

    static nlohmann::json wire_record(const nlohmann::json& t) {
        return {{"key", t.at("key")},
                {"scientificName", t.at("scientificName")},
                {"rank", t.at("rank")}};
    }

    void record(const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        auto t = find_taxon(std::stoll(req.matches[1]));
        if (t.is_null()) {
            res.status = 404;
            return;
        }
        res.set_content(wire_record(t).dump(), "application/json");
    }

    void children(const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        const long long key = std::stoll(req.matches[1]);
        const long long limit = req.has_param("limit") ? std::stoll(req.get_param_value("limit")) : 20;
        const long long offset =
            req.has_param("offset") ? std::stoll(req.get_param_value("offset")) : 0;

        nlohmann::json all = nlohmann::json::array();
        for (const auto& t : fixture_.at("taxa"))
            if (!t.at("parent").is_null() && t.at("parent").get<long long>() == key)
                all.push_back(wire_record(t));

        nlohmann::json results = nlohmann::json::array();
        for (long long i = offset; i < static_cast<long long>(all.size()) && i < offset + limit; ++i)
            results.push_back(all[i]);

        nlohmann::json page = {{"offset", offset},
                               {"limit", limit},
                               {"endOfRecords", offset + limit >= static_cast<long long>(all.size())},
                               {"results", results}};
        res.set_content(page.dump(), "application/json");
    }

    void profiles(const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        const std::string key = req.matches[1];
        nlohmann::json results = nlohmann::json::array();
        if (fixture_.contains("profiles") && fixture_.at("profiles").contains(key))
            results = fixture_.at("profiles").at(key);
        res.set_content(nlohmann::json{{"results", results}}.dump(), "application/json");
    }

    nlohmann::json fixture_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    int requests_ = 0;
};

}  // namespace taxoforge::testing
