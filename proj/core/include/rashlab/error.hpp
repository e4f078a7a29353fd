#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rashlab {

/// Error codes for every failure mode surfaced by the library.
enum class errc {
  file_not_found,
  non_binary_target,
  empty_after_cleaning,
  single_class,
  degenerate_class_size,
  k_too_large,
  unknown_method,
  empty_danger_set,
  no_safe_anchors,
  empty_group,
  constant_input,
  length_mismatch,
  no_features_selected,
  degenerate_variance,
  too_large,
  too_few_profiles,
  single_class_eval,
  dimension_mismatch,
  too_few_groups,
  incomplete_blocks,
  config_invalid,
  unknown_key,
  missing_dataset,
  empty_store,
};

const char* to_string(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

inline const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::file_not_found: return "FileNotFound";
    case errc::non_binary_target: return "NonBinaryTarget";
    case errc::empty_after_cleaning: return "EmptyAfterCleaning";
    case errc::single_class: return "SingleClass";
    case errc::degenerate_class_size: return "DegenerateClassSize";
    case errc::k_too_large: return "KTooLarge";
    case errc::unknown_method: return "UnknownMethod";
    case errc::empty_danger_set: return "EmptyDangerSet";
    case errc::no_safe_anchors: return "NoSafeAnchors";
    case errc::empty_group: return "EmptyGroup";
    case errc::constant_input: return "ConstantInput";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::no_features_selected: return "NoFeaturesSelected";
    case errc::degenerate_variance: return "DegenerateVariance";
    case errc::too_large: return "TooLarge";
    case errc::too_few_profiles: return "TooFewProfiles";
    case errc::single_class_eval: return "SingleClassEval";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::too_few_groups: return "TooFewGroups";
    case errc::incomplete_blocks: return "IncompleteBlocks";
    case errc::config_invalid: return "ConfigInvalid";
    case errc::unknown_key: return "UnknownKey";
    case errc::missing_dataset: return "MissingDataset";
    case errc::empty_store: return "EmptyStore";
  }
  return "UnknownError";
}

}  // namespace rashlab
