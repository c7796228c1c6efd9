// Small string helpers shared across modules.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mao {

std::string_view trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);

/// Label normalization: ASCII case-fold, collapse whitespace runs to one
/// space, trim, then strip trailing punctuation. Used for duplicate detection
/// and for FlatGraph activity labels.
std::string normalize_label(std::string_view s);

/// Levenshtein distance over Unicode code points (invalid UTF-8 bytes count as
/// single units).
std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - lev(a,b) / max(len); 1.0 when both are empty.
double label_similarity(std::string_view a, std::string_view b);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

bool starts_with_ci(std::string_view s, std::string_view prefix);

}  // namespace mao
