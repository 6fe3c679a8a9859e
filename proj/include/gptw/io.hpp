#pragma once

#include "gptw/functionals.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace gptw {

inline constexpr std::uint32_t kGptwVersion = 1;

/// A field together with the wave speed stored alongside it.
struct StoredField {
  ComplexField field;
  double c = 0.0;
};

/// GPTW binary layout, little-endian: "GPTW", u32 version, u32 N, u32 M_1..M_N,
/// f64 T, f64 c, then interleaved (re, im) f64 node values in row-major order.
void write_gptw(std::ostream& os, const ComplexField& f, double c);
void write_gptw(const std::filesystem::path& file, const ComplexField& f, double c);

/// Throws FormatError on a bad header, truncation, trailing bytes or
/// non-finite values; on an unopenable file as well.
StoredField read_gptw(std::istream& is);
StoredField read_gptw(const std::filesystem::path& file);

std::string report_csv_header();
/// T, c, kinetic, potential, momentum, action, residual, integral (re, im),
/// lifted identity (empty when not available).
std::string report_csv_row(const TorusGrid& grid, double c, const ActionReport& r, const Certificate& cert);

}  // namespace gptw
