#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rsn {

// Stable error identifiers. errc_name() strings are part of the CLI
// contract: every failure exits nonzero with one machine-parsable name.
enum class errc {
  // file / header parsing
  too_short,
  bad_magic,
  bad_sizeof_hdr,
  bad_dims,
  unsupported_datatype,
  unsupported_format,
  truncated_data,
  non_finite_data,
  io_failure,
  // taxonomy
  duplicate_index,
  missing_index,
  empty_label,
  malformed_line,
  empty_counts,
  // dataset
  component_count_mismatch,
  grid_mismatch,
  too_few_subjects,
  bad_split,
  bad_k,
  grid_too_small,
  empty_dataset,
  empty_input,
  // model
  bad_config,
  dimension_mismatch,
  bad_class,
  version_mismatch,
  truncated_file,
  shape_mismatch,
  // cli
  bad_component_index,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }
  const char* name() const noexcept { return errc_name(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, std::string message) {
  throw Error(code, std::move(message));
}

inline const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::too_short: return "TooShort";
    case errc::bad_magic: return "BadMagic";
    case errc::bad_sizeof_hdr: return "BadSizeofHdr";
    case errc::bad_dims: return "BadDims";
    case errc::unsupported_datatype: return "UnsupportedDatatype";
    case errc::unsupported_format: return "UnsupportedFormat";
    case errc::truncated_data: return "TruncatedData";
    case errc::non_finite_data: return "NonFiniteData";
    case errc::io_failure: return "IoFailure";
    case errc::duplicate_index: return "DuplicateIndex";
    case errc::missing_index: return "MissingIndex";
    case errc::empty_label: return "EmptyLabel";
    case errc::malformed_line: return "MalformedLine";
    case errc::empty_counts: return "EmptyCounts";
    case errc::component_count_mismatch: return "ComponentCountMismatch";
    case errc::grid_mismatch: return "GridMismatch";
    case errc::too_few_subjects: return "TooFewSubjects";
    case errc::bad_split: return "BadSplit";
    case errc::bad_k: return "BadK";
    case errc::grid_too_small: return "GridTooSmall";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::empty_input: return "EmptyInput";
    case errc::bad_config: return "BadConfig";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::bad_class: return "BadClass";
    case errc::version_mismatch: return "VersionMismatch";
    case errc::truncated_file: return "TruncatedFile";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::bad_component_index: return "BadComponentIndex";
  }
  return "UnknownError";
}

}  // namespace rsn
