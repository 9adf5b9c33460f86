#include "typelink/text.hpp"

#include <cctype>

namespace typelink {
namespace {

bool is_space_ascii(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\v' || cp == U'\f';
}

bool is_punct_ascii(char32_t cp) {
  return cp < 0x80 && std::ispunct(static_cast<int>(cp)) != 0;
}

// One decoded scalar: its byte range in the input and its codepoint.
struct Scalar {
  std::size_t byte_begin;
  std::size_t byte_end;
  char32_t cp;
};

// Lenient UTF-8 decoder: malformed bytes count as one scalar each, so the
// scalar-offset contract stays total on arbitrary input.
std::vector<Scalar> decode(std::string_view text) {
  std::vector<Scalar> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char b = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b;
    if (b >= 0xf0)
      len = 4;
    else if (b >= 0xe0)
      len = 3;
    else if (b >= 0xc0)
      len = 2;
    if (len > 1) {
      if (i + len > text.size()) {
        len = 1;
      } else {
        char32_t acc = b & (0x7f >> len);
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
          unsigned char c = static_cast<unsigned char>(text[i + k]);
          if ((c & 0xc0) != 0x80) {
            ok = false;
            break;
          }
          acc = (acc << 6) | (c & 0x3f);
        }
        if (ok)
          cp = acc;
        else
          len = 1;
      }
    }
    out.push_back({i, i + len, cp});
    i += len;
  }
  return out;
}

void append_lowered(std::string& dst, std::string_view text, const Scalar& s) {
  if (s.cp < 0x80) {
    dst.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(text[s.byte_begin]))));
  } else {
    dst.append(text.substr(s.byte_begin, s.byte_end - s.byte_begin));
  }
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  const std::vector<Scalar> scalars = decode(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = scalars.size();
  while (i < n) {
    while (i < n && is_space_ascii(scalars[i].cp)) ++i;
    std::size_t j = i;
    while (j < n && !is_space_ascii(scalars[j].cp)) ++j;
    if (j > i) {
      std::size_t a = i;
      std::size_t b = j;
      while (a < b && is_punct_ascii(scalars[a].cp)) ++a;
      while (b > a && is_punct_ascii(scalars[b - 1].cp)) --b;
      if (a < b) {
        Token tok;
        tok.start = a;
        tok.end = b;
        tok.norm.reserve(b - a);
        for (std::size_t k = a; k < b; ++k) append_lowered(tok.norm, text, scalars[k]);
        tokens.push_back(std::move(tok));
      }
    }
    i = j;
  }
  return tokens;
}

std::vector<std::string> normalize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(text)) out.push_back(std::move(tok.norm));
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string normalize_join(std::string_view text) {
  return join_tokens(normalize(text));
}

std::size_t scalar_length(std::string_view text) { return decode(text).size(); }

std::vector<std::size_t> scalar_offsets(std::string_view text) {
  const std::vector<Scalar> scalars = decode(text);
  std::vector<std::size_t> offsets;
  offsets.reserve(scalars.size() + 1);
  for (const auto& s : scalars) offsets.push_back(s.byte_begin);
  offsets.push_back(text.size());
  return offsets;
}

std::string scalar_slice(std::string_view text, std::size_t start, std::size_t end) {
  const std::vector<Scalar> scalars = decode(text);
  if (start >= end || start >= scalars.size()) return {};
  if (end > scalars.size()) end = scalars.size();
  return std::string(
      text.substr(scalars[start].byte_begin,
                  scalars[end - 1].byte_end - scalars[start].byte_begin));
}

}  // namespace typelink
