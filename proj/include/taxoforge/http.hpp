#pragma once

#include <string>
#include <vector>

#include "taxoforge/config.hpp"

namespace taxoforge {

// GET with redirect following and 5xx/timeout retry per policy. Returns the
// final 200 body. Throws HttpError, TooManyRedirects or Timeout.
std::vector<unsigned char> download(const std::string& url, const HttpPolicy& policy);

std::string download_text(const std::string& url, const HttpPolicy& policy);

}  // namespace taxoforge
