#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rsn {

// One row of the component->label table.
struct LabelEntry {
  int component_index = 0;
  std::string raw_label;
  int class_id = 0;
};

// "FUNCTION-LOCATION-SUBLOCATION"; location/sublocation may be absent.
struct LabelParts {
  std::string function;
  std::optional<std::string> location;
  std::optional<std::string> sublocation;
};

enum class WeightScheme { inverse_frequency, uniform };

// Component->label mapping plus the deduplicated class table. Class ids
// are assigned in first-appearance order of the labels. Immutable after
// load; safe for concurrent shared reads.
class Taxonomy {
 public:
  // Parses "index<TAB>LABEL" lines; '#' lines and blank lines are ignored.
  // Indices must cover 0..n-1 exactly once.
  static Taxonomy from_text(std::string_view text);
  static Taxonomy from_file(const std::string& path);

  // Emits the table in the same line format (no comments). from_text of
  // the result reproduces this taxonomy exactly.
  std::string to_text() const;

  const std::vector<LabelEntry>& entries() const { return entries_; }
  const std::vector<std::string>& classes() const { return classes_; }
  // Number of components mapped to each class.
  const std::vector<int>& class_counts() const { return class_counts_; }

  int num_components() const { return static_cast<int>(entries_.size()); }
  int num_classes() const { return static_cast<int>(classes_.size()); }
  int class_of_component(int component_index) const;
  const std::string& class_label(int class_id) const;

 private:
  std::vector<LabelEntry> entries_;   // sorted by component_index
  std::vector<std::string> classes_;  // first-appearance order
  std::vector<int> class_counts_;
};

// Splits a raw label on '-': first token is the function, second (if any)
// the location, the remaining tokens rejoined with '-' the sublocation.
LabelParts parse_label(std::string_view raw);

// Per-class loss weights. inverse_frequency: w_c = N / (K * n_c) with
// N = total samples and K = number of classes; uniform: all ones.
// Zero counts (classes absent from the training data) are clamped to 1
// with a warning on stderr.
std::vector<double> class_weights(std::span<const std::int64_t> counts,
                                  WeightScheme scheme);

}  // namespace rsn
