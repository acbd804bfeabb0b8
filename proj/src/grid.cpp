#include "nslab/grid.hpp"

#include <numbers>
#include <string>

#include "nslab/error.hpp"

namespace nslab {

double Grid3::k0() const { return 2.0 * std::numbers::pi / L; }

Grid3 make_grid(int n, double L) {
  if (n < 8 || n % 2 != 0)
    throw InvalidArgument("make_grid: n must be even and >= 8, got " + std::to_string(n));
  if (!(L > 0.0))
    throw InvalidArgument("make_grid: box length must be positive, got " + std::to_string(L));
  return Grid3{n, L};
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* where) {
  if (!(a == b)) throw InvalidArgument(std::string(where) + ": grid mismatch");
}

}  // namespace nslab
