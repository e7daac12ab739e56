#include "adagmrf/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "adagmrf/errors.hpp"

namespace adagmrf {
namespace {

static_assert(std::endian::native == std::endian::little,
              "sample files are written in host byte order");

constexpr char kMagic[8] = {'A', 'D', 'G', 'M', 'R', 'F', 'S', '1'};

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc
                                 : std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

template <class T>
void put(std::ofstream& out, std::span<const T> v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            std::streamsize(v.size_bytes()));
}

template <class T>
void get(std::ifstream& in, std::vector<T>& v, std::size_t count,
         const fs::path& path) {
  v.resize(count);
  in.read(reinterpret_cast<char*>(v.data()), std::streamsize(count * sizeof(T)));
  if (!in) throw ParseError(path.string(), 0, 0, "truncated sample file");
}

}  // namespace

CsvGrid read_csv_grid(const fs::path& path) {
  std::ifstream in = open_in(path);
  CsvGrid g;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      // Trailing blank lines are allowed; interior ones are not.
      std::string rest;
      while (std::getline(in, rest))
        if (!trim(rest).empty())
          throw ParseError(path.string(), row, 1, "empty row");
      break;
    }
    const auto cells = split(line);
    if (g.rows == 0) {
      g.cols = int(cells.size());
    } else if (int(cells.size()) != g.cols) {
      throw ParseError(path.string(), row, std::min<std::size_t>(cells.size(), g.cols) + 1,
                       "ragged row: expected " + std::to_string(g.cols) +
                           " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v;
      if (!parse_number(cells[c], v) || !std::isfinite(v))
        throw ParseError(path.string(), row, c + 1,
                         "not a finite number: '" + std::string(cells[c]) + "'");
      g.values.push_back(v);
    }
    ++g.rows;
  }
  if (g.rows == 0) throw ParseError(path.string(), 1, 1, "empty grid");
  return g;
}

std::vector<std::uint8_t> read_binary_grid(const fs::path& path, int& rows,
                                           int& cols) {
  const CsvGrid g = read_csv_grid(path);
  std::vector<std::uint8_t> y(g.values.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = g.values[i];
    if (v != 0.0 && v != 1.0)
      throw ParseError(path.string(), i / g.cols + 1, i % g.cols + 1,
                       "non-binary cell " + format_number(v, 17));
    y[i] = v == 1.0;
  }
  rows = g.rows;
  cols = g.cols;
  return y;
}

void write_csv_grid(const fs::path& path, std::span<const double> values,
                    int rows, int cols, int digits) {
  if (values.size() != std::size_t(rows) * cols)
    throw DimensionError("write_csv_grid: size does not match rows x cols");
  std::ofstream out = open_out(path);
  std::string line;
  for (int r = 0; r < rows; ++r) {
    line.clear();
    for (int c = 0; c < cols; ++c) {
      if (c) line += ',';
      line += format_number(values[std::size_t(r) * cols + c], digits);
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

void write_csv_grid(const fs::path& path, std::span<const std::uint8_t> values,
                    int rows, int cols) {
  if (values.size() != std::size_t(rows) * cols)
    throw DimensionError("write_csv_grid: size does not match rows x cols");
  std::ofstream out = open_out(path);
  std::string line;
  for (int r = 0; r < rows; ++r) {
    line.clear();
    for (int c = 0; c < cols; ++c) {
      if (c) line += ',';
      line += values[std::size_t(r) * cols + c] ? '1' : '0';
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

bool is_peak_list(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) return false;
  const auto cells = split(line);
  return cells.size() >= 2 && cells[0] == "x" && cells[1] == "y";
}

std::vector<std::uint8_t> read_peak_list(const fs::path& path, int rows,
                                         int cols, std::optional<Slab> slab) {
  if (rows < LatticeGrid::kMinExtent || cols < LatticeGrid::kMinExtent)
    throw DimensionError("peak list needs a lattice of at least 5 x 5");
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, 1, "empty file");
  const auto header = split(line);
  const bool has_z = header.size() == 3 && header[2] == "z";
  if (header.size() < 2 || header[0] != "x" || header[1] != "y" ||
      (header.size() == 3 && !has_z) || header.size() > 3)
    throw ParseError(path.string(), 1, 1, "expected header 'x,y' or 'x,y,z'");
  if (slab && !has_z)
    throw ParseError(path.string(), 1, 3, "slab selection needs a z column");

  std::vector<std::uint8_t> y(std::size_t(rows) * cols, 0);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError(path.string(), row, std::min(cells.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " fields");
    long x, yy;
    if (!parse_number(cells[0], x))
      throw ParseError(path.string(), row, 1, "x is not an integer");
    if (!parse_number(cells[1], yy))
      throw ParseError(path.string(), row, 2, "y is not an integer");
    if (x < 1 || x > rows)
      throw ParseError(path.string(), row, 1, "x outside 1.." + std::to_string(rows));
    if (yy < 1 || yy > cols)
      throw ParseError(path.string(), row, 2, "y outside 1.." + std::to_string(cols));
    if (has_z) {
      double z;
      if (!parse_number(cells[2], z) || !std::isfinite(z))
        throw ParseError(path.string(), row, 3, "z is not a number");
      if (slab && std::abs(z - slab->center) > slab->half_width) continue;
    }
    y[std::size_t(x - 1) * cols + (yy - 1)] = 1;
  }
  return y;
}

void write_pgm(const fs::path& path, std::span<const double> values, int rows,
               int cols, double lo, double hi) {
  if (values.size() != std::size_t(rows) * cols)
    throw DimensionError("write_pgm: size does not match rows x cols");
  if (!(hi > lo)) throw DomainError("write_pgm: empty intensity range");
  std::ofstream out = open_out(path);
  out << "P2\n" << cols << ' ' << rows << "\n255\n";
  std::string line;
  for (int r = 0; r < rows; ++r) {
    line.clear();
    for (int c = 0; c < cols; ++c) {
      const double v = std::clamp(values[std::size_t(r) * cols + c], lo, hi);
      if (c) line += ' ';
      line += std::to_string(int(std::lround(255.0 * (v - lo) / (hi - lo))));
    }
    line += '\n';
    out << line;
  }
  finish(out, path);
}

void write_trace_csv(const fs::path& path,
                     std::span<const std::uint64_t> iteration,
                     std::span<const double> values) {
  if (iteration.size() != values.size())
    throw DimensionError("write_trace_csv: length mismatch");
  std::ofstream out = open_out(path);
  out << "iteration,value\n";
  for (std::size_t k = 0; k < values.size(); ++k)
    out << iteration[k] << ',' << format_number(values[k], 17) << '\n';
  finish(out, path);
}

void write_samples(const fs::path& path, const SampleStream& s) {
  std::ofstream out = open_out(path, true);
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t dims[5] = {std::uint64_t(s.rows), std::uint64_t(s.cols),
                                 s.n, s.m, s.size()};
  put<std::uint64_t>(out, dims);
  put<std::uint64_t>(out, s.iteration);
  put<double>(out, s.z);
  put<double>(out, s.gamma_sq);
  put<double>(out, s.theta_sq);
  put<double>(out, s.delta);
  put<std::uint8_t>(out, s.psi);
  finish(out, path);
}

SampleStream read_samples(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ParseError(path.string(), 0, 0, "not a sample file");
  std::vector<std::uint64_t> dims;
  get(in, dims, 5, path);
  SampleStream s;
  s.rows = int(dims[0]);
  s.cols = int(dims[1]);
  s.n = dims[2];
  s.m = dims[3];
  const std::size_t count = dims[4];
  if (s.n != std::size_t(s.rows) * s.cols)
    throw ParseError(path.string(), 0, 0, "inconsistent dimensions");
  get(in, s.iteration, count, path);
  get(in, s.z, count * s.n, path);
  get(in, s.gamma_sq, count * s.m, path);
  get(in, s.theta_sq, count, path);
  get(in, s.delta, count, path);
  get(in, s.psi, count * s.n, path);
  return s;
}

std::string git_blob_sha1(std::span<const std::uint8_t> content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) &&
                  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : std::span(digest, len)) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

std::string git_blob_sha1(const fs::path& path) {
  const std::string text = read_text(path);
  return git_blob_sha1(std::span(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_out(path, true);
  out << text;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace adagmrf
