#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the pipeline and the mock backends.
namespace docsray::text {

std::string_view trim(std::string_view s);

// First line that is non-empty after trimming, trimmed; empty if none.
std::string_view first_nonempty_line(std::string_view s);

// Lowercased alphanumeric runs (bytes >= 0x80 count as word characters).
std::vector<std::string> words(std::string_view s);

// First / last `max_bytes` bytes, never splitting a UTF-8 sequence.
std::string_view utf8_head(std::string_view s, std::size_t max_bytes);
std::string_view utf8_tail(std::string_view s, std::size_t max_bytes);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::vector<std::string> split_lines(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

// Text between `open` and the next `close` after it; npos-safe.
std::string_view between(std::string_view s, std::string_view open, std::string_view close);

}  // namespace docsray::text
