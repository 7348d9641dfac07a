#include "eikfm/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "eikfm/errors.hpp"

namespace eikfm {

namespace {

constexpr const char* kMagic = "EIKFIELD";
constexpr const char* kVersion = "v1";

template <typename T>
T byteswap_if_needed(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }
}

template <typename T>
void write_le(std::ostream& os, std::span<const T> values) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (T v : values) {
      const T s = byteswap_if_needed(v);
      os.write(reinterpret_cast<const char*>(&s), sizeof(T));
    }
  }
  if (!os) throw DomainError("write failed");
}

template <typename T>
void read_le(std::istream& is, std::span<T> values) {
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size_bytes()));
  if (is.gcount() != static_cast<std::streamsize>(values.size_bytes())) {
    throw DomainError("truncated binary payload");
  }
  if constexpr (std::endian::native != std::endian::little) {
    for (T& v : values) v = byteswap_if_needed(v);
  }
}

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace

void write_le_doubles(std::ostream& os, std::span<const double> values) {
  write_le(os, values);
}
void read_le_doubles(std::istream& is, std::span<double> values) {
  read_le(is, values);
}
void write_le_int64(std::ostream& os, std::span<const std::int64_t> values) {
  write_le(os, values);
}
void read_le_int64(std::istream& is, std::span<std::int64_t> values) {
  read_le(is, values);
}

std::string field_header(const RegularGrid& grid) {
  std::ostringstream os;
  os << kMagic << ' ' << kVersion << ' ' << grid.dim();
  for (int d = 0; d < grid.dim(); ++d) os << ' ' << grid.count(d);
  os << ' ' << format_real(grid.spacing());
  for (int d = 0; d < grid.dim(); ++d) os << ' ' << format_real(grid.origin(d));
  return os.str();
}

RegularGrid parse_field_header(const std::string& line) {
  std::istringstream is(line);
  std::string magic, version;
  int dim = 0;
  if (!(is >> magic >> version >> dim) || magic != kMagic) {
    throw DomainError("not an EIKFIELD header");
  }
  if (version != kVersion) {
    throw DomainError("unsupported EIKFIELD version '" + version + "'");
  }
  if (dim != 2 && dim != 3) throw DomainError("EIKFIELD: bad dimension");
  std::vector<int> counts(static_cast<std::size_t>(dim));
  std::vector<double> origin(static_cast<std::size_t>(dim));
  double h = 0.0;
  for (int& n : counts) {
    if (!(is >> n)) throw DomainError("EIKFIELD: bad node counts");
  }
  if (!(is >> h)) throw DomainError("EIKFIELD: bad spacing");
  for (double& o : origin) {
    if (!(is >> o)) throw DomainError("EIKFIELD: bad origin");
  }
  return RegularGrid(counts, h, origin);
}

void write_field(std::ostream& os, const ScalarField& field) {
  os << field_header(field.grid()) << '\n';
  write_le_doubles(os, field.values());
}

ScalarField read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("EIKFIELD: empty input");
  const RegularGrid grid = parse_field_header(line);
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  read_le_doubles(is, values);
  return ScalarField(grid, std::move(values));
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open '" + path.string() + "' for writing");
  write_field(os, field);
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open '" + path.string() + "'");
  return read_field(is);
}

void write_field_csv(std::ostream& os, const ScalarField& field) {
  const RegularGrid& g = field.grid();
  os << "# " << field_header(g) << '\n';
  for (int d = 0; d < g.dim(); ++d) os << 'i' << d << ',';
  os << "value\n";
  for (Index k = 0; k < field.size(); ++k) {
    const MultiIndex idx = g.delinearize(k);
    for (int d = 0; d < g.dim(); ++d) os << idx[d] << ',';
    os << format_real(field[k]) << '\n';
  }
}

ScalarField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw DomainError("field CSV: missing '# EIKFIELD' grid line");
  }
  const RegularGrid grid = parse_field_header(line.substr(2));
  if (!std::getline(is, line)) throw DomainError("field CSV: missing header");
  ScalarField field(grid, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> seen(static_cast<std::size_t>(grid.size()), 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    MultiIndex idx{0, 0, 0};
    std::string cell;
    for (int d = 0; d < grid.dim(); ++d) {
      if (!std::getline(row, cell, ',')) throw DomainError("field CSV: short row");
      idx[d] = std::stoi(cell);
    }
    if (!std::getline(row, cell)) throw DomainError("field CSV: missing value");
    if (!grid.contains(idx)) throw DomainError("field CSV: index out of range");
    const Index k = grid.linearize(idx);
    field[k] = std::stod(cell);
    seen[static_cast<std::size_t>(k)] = 1;
  }
  for (char s : seen) {
    if (!s) throw DomainError("field CSV: missing nodes");
  }
  return field;
}

}  // namespace eikfm
