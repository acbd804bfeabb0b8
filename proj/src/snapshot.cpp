#include "nslab/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "nslab/error.hpp"

namespace nslab {
namespace {

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffu);
  return r;
}

void put_le(std::ostream& os, double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  os.write(buf, 8);
}

double get_le(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw Error("NSF1: truncated sample data");
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) bits = byteswap64(bits);
  return std::bit_cast<double>(bits);
}

std::string field_value(const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) throw Error("NSF1: expected '" + prefix + "' in header");
  return token.substr(prefix.size());
}

}  // namespace

void write_snapshot(std::ostream& os, const VectorField& field, double time) {
  char header[160];
  std::snprintf(header, sizeof header, "NSF1 n=%d L=%.17g t=%.17g components=3\n",
                field.grid.n, field.grid.L, time);
  os << header;
  for (const auto& c : field.comp)
    for (double v : c) put_le(os, v);
  if (!os) throw Error("NSF1: write failed");
}

Snapshot read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("NSF1: missing header");
  std::istringstream hs(line);
  std::string magic, tn, tl, tt, tc;
  hs >> magic >> tn >> tl >> tt >> tc;
  if (magic != "NSF1") throw Error("NSF1: bad magic '" + magic + "'");
  const int n = std::stoi(field_value(tn, "n"));
  const double L = std::stod(field_value(tl, "L"));
  const double t = std::stod(field_value(tt, "t"));
  if (field_value(tc, "components") != "3") throw Error("NSF1: only 3 components supported");
  Snapshot snap{VectorField(make_grid(n, L)), t};
  for (auto& c : snap.field.comp)
    for (double& v : c) v = get_le(is);
  return snap;
}

void write_snapshot(const std::filesystem::path& path, const VectorField& field, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("NSF1: cannot open " + path.string());
  write_snapshot(os, field, time);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("NSF1: cannot open " + path.string());
  return read_snapshot(is);
}

}  // namespace nslab
