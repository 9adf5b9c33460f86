#pragma once

#include <compare>
#include <cstddef>
#include <string>

namespace typelink {

/// A unit of input text. All spans into `text` are measured in Unicode
/// scalar values, not bytes.
struct Document {
  std::string id;
  std::string text;
};

/// Ground-truth (or silver) annotation: a span grounded to a concept.
struct GoldAnnotation {
  std::string doc_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string cui;
};

/// Mention identity used to join annotations, scores and candidates.
struct SpanKey {
  std::string doc_id;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const SpanKey&) const = default;
};

inline SpanKey key_of(const GoldAnnotation& g) { return {g.doc_id, g.start, g.end}; }

}  // namespace typelink
