// Standalone fixture API server, the same one the tests embed. Useful for
// poking the CLI against a local tree:
//   taxo_mock_server fixture.json 8080
#include <fstream>
#include <iostream>

#include <httplib.h>
#include <json.hpp>

#include "mock_api.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: taxo_mock_server <fixture.json> [port]" << std::endl;
        return 2;
    }
    std::ifstream in(argv[1]);
    if (!in) {
        std::cerr << "cannot open " << argv[1] << std::endl;
        return 1;
    }
    nlohmann::json fixture = nlohmann::json::parse(in);

    taxoforge::testing::MockApi api(std::move(fixture));
    std::cout << api.base_url() << std::endl;
    // MockApi binds an ephemeral port; keep serving until killed.
    for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}
