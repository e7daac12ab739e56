#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adagmrf/lattice.hpp"
#include "adagmrf/sampler.hpp"

namespace adagmrf {

namespace fs = std::filesystem;

// Numeric grid read from a headerless comma-separated file.
struct CsvGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major
};

// Throws ParseError (1-based row/column) on ragged rows, empty cells or
// non-numeric text, and std::runtime_error when the file cannot be opened.
CsvGrid read_csv_grid(const fs::path& path);

// Binary grid; any cell other than 0 or 1 is a ParseError at that cell.
std::vector<std::uint8_t> read_binary_grid(const fs::path& path, int& rows,
                                           int& cols);

// Values with `digits` significant digits (probability maps use 6).
void write_csv_grid(const fs::path& path, std::span<const double> values,
                    int rows, int cols, int digits = 6);
void write_csv_grid(const fs::path& path, std::span<const std::uint8_t> values,
                    int rows, int cols);

// Peak-list input: header "x,y" or "x,y,z", then one integer coordinate per
// line. x is the 1-based lattice row, y the 1-based column. With a slab,
// only peaks whose z lies within `half_width` of `center` are kept.
struct Slab {
  double center = 0.0;
  double half_width = 10.0;
};

std::vector<std::uint8_t> read_peak_list(const fs::path& path, int rows,
                                         int cols,
                                         std::optional<Slab> slab = {});

// True when the first line of the file is a peak-list header.
bool is_peak_list(const fs::path& path);

// P2 ASCII image with maxval 255; values are clamped to [lo, hi] and mapped
// linearly.
void write_pgm(const fs::path& path, std::span<const double> values, int rows,
               int cols, double lo = 0.0, double hi = 1.0);

// Trace CSV with header "iteration,value".
void write_trace_csv(const fs::path& path,
                     std::span<const std::uint64_t> iteration,
                     std::span<const double> values);

// Columnar sample file, little-endian:
//   "ADGMRFS1" magic, u64 rows, cols, n, m, count,
//   u64 iteration[count], f64 z[count n], f64 gamma_sq[count m],
//   f64 theta_sq[count], f64 delta[count], u8 psi[count n].
// Monitor traces are not stored.
void write_samples(const fs::path& path, const SampleStream& stream);
SampleStream read_samples(const fs::path& path);

// git blob hash: SHA-1 of "blob <size>\0" followed by the content, as hex.
std::string git_blob_sha1(std::span<const std::uint8_t> content);
std::string git_blob_sha1(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace adagmrf
