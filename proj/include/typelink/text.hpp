#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace typelink {

/// A token after normalization: lowercased, punctuation stripped from both
/// edges. start/end are offsets into the original text counted in Unicode
/// scalar values and exclude the stripped edge punctuation.
struct Token {
  std::string norm;
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Offset-preserving tokenizer. Splits on ASCII whitespace, strips ASCII
/// punctuation from token edges (internal punctuation like "non-small" is
/// kept), lowercases ASCII letters, drops tokens that end up empty.
std::vector<Token> tokenize(std::string_view text);

/// Token sequence of tokenize(), without offsets. Deterministic and
/// idempotent: normalize(join(normalize(s))) == normalize(s).
std::vector<std::string> normalize(std::string_view text);

/// join(normalize(text)) with single spaces; the alias-index key form.
std::string normalize_join(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);

/// Length of text in Unicode scalar values.
std::size_t scalar_length(std::string_view text);

/// Byte offset of every scalar position; size scalar_length(text)+1, last
/// entry text.size(). Lets callers slice many spans after one decode pass.
std::vector<std::size_t> scalar_offsets(std::string_view text);

/// Substring by scalar-value offsets, [start, end).
std::string scalar_slice(std::string_view text, std::size_t start, std::size_t end);

}  // namespace typelink
