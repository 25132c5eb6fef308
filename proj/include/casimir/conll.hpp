#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "casimir/graph_model.hpp"

namespace casimir {

// Gold index for a tag missing from a fixed alphabet.
inline constexpr Label kUnknownLabel = -1;

struct Sequence {
  // tokens[t] holds the attribute columns of token t (every column but the last).
  std::vector<std::vector<std::string>> tokens;
  Labeling labels;

  std::size_t length() const { return labels.size(); }
};

struct TaggedDataset {
  std::vector<Sequence> sequences;
  // Tags in first-seen order unless fixed by the reader's caller.
  std::vector<std::string> label_alphabet;
  std::size_t num_attributes = 0;
  // Non-fatal issues found while reading, e.g. tags outside a fixed alphabet.
  std::vector<std::string> warnings;

  std::size_t size() const { return sequences.size(); }
  std::size_t num_tokens() const;
};

struct ColumnSpec {
  // Attribute columns to keep, by position; empty keeps all but the last.
  std::vector<std::size_t> attributes;
  // Fixed alphabet (evaluation); unknown tags become kUnknownLabel with a
  // warning. Empty builds the alphabet from the data.
  std::optional<std::vector<std::string>> alphabet;
};

// Whitespace-separated columns, last column the tag, blank lines (and
// -DOCSTART- lines) between sentences. Throws ParseError on rows whose
// column count differs from the first row.
TaggedDataset read_conll(std::istream& in, const ColumnSpec& spec = {});
// Throws InvalidInput if the file cannot be opened.
TaggedDataset read_conll_file(const std::string& path, const ColumnSpec& spec = {});

// Inverse of read_conll for datasets with known labels.
void write_conll(std::ostream& out, const TaggedDataset& data);

}  // namespace casimir
