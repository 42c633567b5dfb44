#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace taxoforge {

// src attributes of all <img> tags in document order, resolved against
// base_url, first occurrence kept. Tolerates arbitrary garbage input.
std::vector<std::string> parse_image_urls(std::string_view html, const std::string& base_url);

}  // namespace taxoforge
