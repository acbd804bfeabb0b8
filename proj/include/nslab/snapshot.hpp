#pragma once

#include <filesystem>
#include <iosfwd>

#include "nslab/field.hpp"

namespace nslab {

/// A physical-space velocity snapshot in the NSF1 format:
///   "NSF1 n=<n> L=<float> t=<float> components=3\n"
/// followed by 3*n^3 little-endian float64, component-major, x fastest.
struct Snapshot {
  VectorField field;
  double time = 0.0;
};

void write_snapshot(std::ostream& os, const VectorField& field, double time);
Snapshot read_snapshot(std::istream& is);

void write_snapshot(const std::filesystem::path& path, const VectorField& field, double time);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace nslab
