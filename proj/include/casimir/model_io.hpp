#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "casimir/features.hpp"

namespace casimir {

inline constexpr char kModelMagic[4] = {'C', 'S', 'M', 'R'};
inline constexpr std::uint32_t kModelVersion = 1;

// Everything needed to rebuild the feature map and score new data.
struct SavedModel {
  FeatureConfig features;
  std::uint64_t num_attributes = 0;
  std::vector<std::string> alphabet;
  Vector w;

  FeatureMap feature_map() const;
};

// Layout (little-endian): magic "CSMR", u32 version, u32 hash_bits,
// u64 hash_seed, i32 window, u64 attribute columns, u64 tag count, tags as
// (u64 length, bytes), u64 d, d doubles.
void write_model(std::ostream& out, const SavedModel& model);
// Throws ModelFormatError on a bad magic number, a version other than
// kModelVersion (naming both), truncation, or inconsistent sizes.
SavedModel read_model(std::istream& in);

void save_model(const std::string& path, const SavedModel& model);
SavedModel load_model(const std::string& path);

}  // namespace casimir
