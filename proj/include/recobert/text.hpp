#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace recobert::text {

/// NFKC-normalizes UTF-8 input. Invalid sequences become U+FFFD.
std::string nfkc(std::string_view utf8);

/// NFKC followed by Unicode lowercasing.
std::string nfkc_lower(std::string_view utf8);

std::string trim(std::string_view s);

/// Splits on Unicode whitespace; punctuation code points become single tokens.
/// Input is expected to be normalized already.
std::vector<std::string> split_words(std::string_view utf8);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace recobert::text
