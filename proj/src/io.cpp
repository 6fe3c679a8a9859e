#include "gptw/io.hpp"

#include "gptw/csv.hpp"
#include "gptw/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace gptw {

namespace {

constexpr char kMagic[4] = {'G', 'P', 'T', 'W'};

template <class T>
void put(std::ostream& os, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T))) throw FormatError(std::string("GPTW file truncated in ") + what);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_gptw(std::ostream& os, const ComplexField& f, double c) {
  const ComplexField phys = f.is_physical() ? f : transform_inverse(f);
  const auto& grid = phys.grid();
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kGptwVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.size(a)));
  put<double>(os, grid.period());
  put<double>(os, c);
  for (const Complex& z : phys.values()) {
    put<double>(os, z.real());
    put<double>(os, z.imag());
  }
  if (!os) throw Error("failed writing GPTW data");
}

void write_gptw(const std::filesystem::path& file, const ComplexField& f, double c) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot open " + file.string() + " for writing");
  write_gptw(os, f, c);
}

StoredField read_gptw(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4)) throw FormatError("GPTW file truncated in magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a GPTW file (bad magic)");
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kGptwVersion) throw FormatError("unsupported GPTW version " + std::to_string(version));
  const auto dim = get<std::uint32_t>(is, "dimension");
  if (dim < 2 || dim > 3) throw FormatError("GPTW dimension must be 2 or 3");
  std::vector<int> sizes;
  for (std::uint32_t a = 0; a < dim; ++a) {
    const auto m = get<std::uint32_t>(is, "sizes");
    if (m > (1u << 16)) throw FormatError("GPTW grid size out of range");
    sizes.push_back(static_cast<int>(m));
  }
  const double T = get<double>(is, "period");
  const double c = get<double>(is, "speed");
  std::optional<TorusGrid> grid;
  try {
    grid.emplace(sizes, T);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("invalid GPTW grid: ") + e.what());
  }
  if (!std::isfinite(c)) throw FormatError("GPTW speed is not finite");
  Eigen::VectorXcd values(grid->node_count());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double re = get<double>(is, "values");
    const double im = get<double>(is, "values");
    values[i] = Complex(re, im);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after GPTW payload");
  if (!values.allFinite()) throw FormatError("GPTW values are not finite");
  return {ComplexField(*grid, std::move(values)), c};
}

StoredField read_gptw(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw FormatError("cannot open " + file.string());
  return read_gptw(is);
}

std::string report_csv_header() {
  return "T,c,kinetic,potential,momentum,action,residual,cert_integral_re,cert_integral_im,cert_lift";
}

std::string report_csv_row(const TorusGrid& grid, double c, const ActionReport& r, const Certificate& cert) {
  std::string row = fmt17(grid.period());
  for (double v : {c, r.kinetic, r.potential, r.momentum, r.action, cert.residual, cert.integral.real(),
                   cert.integral.imag()})
    row += ',' + fmt17(v);
  row += ',';
  if (cert.lifted) row += fmt17(*cert.lifted);
  return row;
}

}  // namespace gptw
