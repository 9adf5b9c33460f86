#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "typelink/corpus_builder.hpp"
#include "typelink/document.hpp"
#include "typelink/filter.hpp"
#include "typelink/matcher.hpp"

namespace typelink {

/// {"id","text"} per line; extra fields ignored. Returned sorted by id;
/// duplicate ids are an error.
std::vector<Document> load_documents_jsonl(const std::filesystem::path& path);

/// {"doc_id","start","end","cui"} per line. Spans are not validated against
/// any document here; (doc_id,start,end) must be unique.
std::vector<GoldAnnotation> load_gold_jsonl(const std::filesystem::path& path);

/// Like load_gold_jsonl but allows several cuis on one span (silver corpora
/// emit that legitimately); used to build typer training sets.
std::vector<GoldAnnotation> load_annotations_jsonl(const std::filesystem::path& path);

/// {"id","text","headings":[{"name","cui"},...]} per line.
std::vector<HeadedDocument> load_headed_documents_jsonl(const std::filesystem::path& path);

/// {"id","text","links":[{"start","end","page_key"},...]} per line.
std::vector<LinkedDocument> load_linked_documents_jsonl(const std::filesystem::path& path);

/// {"doc_id","start","end","surface","candidates":[{"cui","score","rank"}]}
void write_candidates_jsonl(std::ostream& out, const std::vector<CandidateSet>& sets);

/// {"doc_id","start","end","surface","chosen_cui","predicted_groups",
///  "pre_filter_size","post_filter_size","candidates":[...]}
void write_linked_jsonl(std::ostream& out, const std::vector<LinkedMention>& linked);

/// Reads linked output back for evaluation. Fields beyond the gold triple
/// and chosen_cui are optional.
std::vector<LinkedMention> load_linked_jsonl(const std::filesystem::path& path);

/// Silver annotations in the gold JSONL shape (plus provenance).
void write_silver_jsonl(std::ostream& out, const SilverCorpus& corpus);

}  // namespace typelink
