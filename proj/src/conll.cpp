#include "casimir/conll.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "casimir/errors.hpp"

namespace casimir {

std::size_t TaggedDataset::num_tokens() const {
  std::size_t t = 0;
  for (const auto& s : sequences) t += s.length();
  return t;
}

TaggedDataset read_conll(std::istream& in, const ColumnSpec& spec) {
  TaggedDataset data;
  std::unordered_map<std::string, Label> index;
  if (spec.alphabet) {
    data.label_alphabet = *spec.alphabet;
    for (std::size_t k = 0; k < data.label_alphabet.size(); ++k)
      index.emplace(data.label_alphabet[k], static_cast<Label>(k));
  }

  std::size_t columns = 0;
  std::size_t lineno = 0;
  Sequence current;
  const auto flush = [&] {
    if (current.length() > 0) data.sequences.push_back(std::move(current));
    current = Sequence{};
  };

  std::string line;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    fields.clear();
    for (std::string f; ss >> f;) fields.push_back(std::move(f));
    if (fields.empty() || fields[0] == "-DOCSTART-") {
      flush();
      continue;
    }
    if (columns == 0) {
      if (fields.size() < 2) throw ParseError("expected a token and a tag column", lineno);
      columns = fields.size();
      for (std::size_t c : spec.attributes)
        if (c + 1 >= columns) throw ParseError("attribute column " + std::to_string(c) + " out of range", lineno);
      data.num_attributes = spec.attributes.empty() ? columns - 1 : spec.attributes.size();
    } else if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " columns, found " + std::to_string(fields.size()),
                       lineno);
    }

    std::vector<std::string> attrs;
    if (spec.attributes.empty()) {
      attrs.assign(fields.begin(), fields.end() - 1);
    } else {
      for (std::size_t c : spec.attributes) attrs.push_back(fields[c]);
    }
    const std::string& tag = fields.back();
    Label label = kUnknownLabel;
    if (auto it = index.find(tag); it != index.end()) {
      label = it->second;
    } else if (!spec.alphabet) {
      label = static_cast<Label>(data.label_alphabet.size());
      index.emplace(tag, label);
      data.label_alphabet.push_back(tag);
    } else {
      data.warnings.push_back("line " + std::to_string(lineno) + ": unknown tag '" + tag + "'");
    }
    current.tokens.push_back(std::move(attrs));
    current.labels.push_back(label);
  }
  flush();
  return data;
}

TaggedDataset read_conll_file(const std::string& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_conll(in, spec);
}

void write_conll(std::ostream& out, const TaggedDataset& data) {
  bool first = true;
  for (const auto& s : data.sequences) {
    if (!first) out << '\n';
    first = false;
    for (std::size_t t = 0; t < s.length(); ++t) {
      for (const auto& a : s.tokens[t]) out << a << ' ';
      const Label y = s.labels[t];
      if (y < 0 || static_cast<std::size_t>(y) >= data.label_alphabet.size())
        throw InvalidInput("cannot write an unknown label");
      out << data.label_alphabet[static_cast<std::size_t>(y)] << '\n';
    }
  }
}

}  // namespace casimir
