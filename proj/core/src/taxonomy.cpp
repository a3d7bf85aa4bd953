#include "rsn/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "rsn/error.hpp"

namespace rsn {
namespace {

bool valid_label_charset(std::string_view label) {
  return std::all_of(label.begin(), label.end(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace

Taxonomy Taxonomy::from_text(std::string_view text) {
  Taxonomy tax;
  std::vector<LabelEntry> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t first_nonspace = line.find_first_not_of(" \t");
    if (first_nonspace == std::string_view::npos ||
        line[first_nonspace] == '#')
      continue;
    line = line.substr(first_nonspace);

    // index<TAB>LABEL; a space run is tolerated in place of the tab.
    std::size_t sep = line.find_first_of("\t ");
    if (sep == std::string_view::npos)
      fail(errc::malformed_line,
           "line " + std::to_string(line_no) + ": no separator");
    const std::string_view index_token = line.substr(0, sep);
    const std::string_view label_token = trim(line.substr(sep + 1));

    int index = -1;
    const auto [ptr, ec] = std::from_chars(
        index_token.data(), index_token.data() + index_token.size(), index);
    if (ec != std::errc{} || ptr != index_token.data() + index_token.size() ||
        index < 0)
      fail(errc::malformed_line,
           "line " + std::to_string(line_no) + ": bad component index");
    if (label_token.empty())
      fail(errc::empty_label, "line " + std::to_string(line_no));
    if (!valid_label_charset(label_token))
      fail(errc::malformed_line,
           "line " + std::to_string(line_no) +
               ": label must be uppercase alphanumeric plus '-'");

    rows.push_back({index, std::string(label_token), -1});
  }

  if (rows.empty()) fail(errc::empty_input, "taxonomy has no data lines");

  std::vector<int> seen(rows.size(), 0);
  for (const auto& row : rows) {
    if (row.component_index >= static_cast<int>(rows.size()))
      fail(errc::missing_index,
           "indices do not cover 0.." + std::to_string(rows.size() - 1));
    if (seen[static_cast<std::size_t>(row.component_index)]++)
      fail(errc::duplicate_index,
           "component index " + std::to_string(row.component_index));
  }
  std::sort(rows.begin(), rows.end(),
            [](const LabelEntry& a, const LabelEntry& b) {
              return a.component_index < b.component_index;
            });

  std::unordered_map<std::string, int> class_of;
  for (auto& row : rows) {
    auto [it, inserted] =
        class_of.try_emplace(row.raw_label, static_cast<int>(tax.classes_.size()));
    if (inserted) {
      tax.classes_.push_back(row.raw_label);
      tax.class_counts_.push_back(0);
    }
    row.class_id = it->second;
    ++tax.class_counts_[static_cast<std::size_t>(it->second)];
  }
  tax.entries_ = std::move(rows);
  return tax;
}

Taxonomy Taxonomy::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

std::string Taxonomy::to_text() const {
  std::string out;
  for (const auto& entry : entries_) {
    out += std::to_string(entry.component_index);
    out += '\t';
    out += entry.raw_label;
    out += '\n';
  }
  return out;
}

int Taxonomy::class_of_component(int component_index) const {
  if (component_index < 0 || component_index >= num_components())
    fail(errc::bad_component_index, std::to_string(component_index));
  return entries_[static_cast<std::size_t>(component_index)].class_id;
}

const std::string& Taxonomy::class_label(int class_id) const {
  if (class_id < 0 || class_id >= num_classes())
    fail(errc::bad_class, std::to_string(class_id));
  return classes_[static_cast<std::size_t>(class_id)];
}

LabelParts parse_label(std::string_view raw) {
  raw = trim(raw);
  if (raw.empty()) fail(errc::empty_label, "cannot parse an empty label");
  LabelParts parts;
  const std::size_t first = raw.find('-');
  if (first == std::string_view::npos) {
    parts.function = std::string(raw);
    return parts;
  }
  parts.function = std::string(raw.substr(0, first));
  const std::string_view rest = raw.substr(first + 1);
  const std::size_t second = rest.find('-');
  if (second == std::string_view::npos) {
    parts.location = std::string(rest);
    return parts;
  }
  parts.location = std::string(rest.substr(0, second));
  parts.sublocation = std::string(rest.substr(second + 1));
  return parts;
}

std::vector<double> class_weights(std::span<const std::int64_t> counts,
                                  WeightScheme scheme) {
  if (counts.empty()) fail(errc::empty_counts, "no class counts given");
  const std::size_t num_classes = counts.size();
  std::vector<double> weights(num_classes, 1.0);
  if (scheme == WeightScheme::uniform) return weights;

  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  for (std::size_t i = 0; i < num_classes; ++i) {
    std::int64_t n = counts[i];
    if (n < 1) {
      std::cerr << "warning: class " << i
                << " has no samples; clamping its count to 1 for weighting\n";
      n = 1;
    }
    weights[i] = static_cast<double>(total) /
                 (static_cast<double>(num_classes) * static_cast<double>(n));
  }
  return weights;
}

}  // namespace rsn
