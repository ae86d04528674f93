#pragma once

//==============================================================================
// io.hpp
// Self-describing binary artifact files and CSV mirrors.
//
// Layout (little-endian regardless of host):
//   magic "CROM" | u16 version = 1 | u16 role | u64 rows | u64 cols | payload
//
// roles: 0 field   rows = n_times, cols = nx;   payload: f64 L,
//                  times[rows], values row-major (row = one snapshot)
//        1 series  rows = n_times, cols = n;    payload: u64 basis_id,
//                  times[rows], values row-major (row = one sample)
//        2 model   rows = n, cols = noise cols; payload: u16 tag,
//                  linear (n x n), constant (n), noise (n x d),
//                  u64 quad count, records {u32 eq, u32 j, u32 k, f64 coef}
//        3 matrix  payload: values row-major
//        4 basis   rows = size, cols = 2*n_pairs; payload: u16 kind, f64 L,
//                  f64 total_energy, eigenvalues[rows], coef row-major
//
// Files are written to a temporary sibling and renamed into place.
//==============================================================================

#include <Eigen/Dense>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crom/basis.hpp"
#include "crom/errors.hpp"
#include "crom/kse.hpp"
#include "crom/model.hpp"

namespace crom::io {

enum class Role : std::uint16_t { field = 0, series = 1, model = 2, matrix = 3, basis = 4 };

constexpr std::uint16_t kFormatVersion = 1;

namespace detail {

inline void put_bytes(std::string& buf, const void* p, std::size_t n) {
  buf.append(static_cast<const char*>(p), n);
}

inline void put_u16(std::string& buf, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>(v >> 8)};
  put_bytes(buf, b, 2);
}

inline void put_u32(std::string& buf, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  put_bytes(buf, b, 4);
}

inline void put_u64(std::string& buf, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  put_bytes(buf, b, 8);
}

inline void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(buf, bits);
}

// Row-major dump of an Eigen matrix.
inline void put_matrix(std::string& buf, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(buf, m(r, c));
}

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    data_ = ss.str();
  }

  std::uint16_t u16() { return static_cast<std::uint16_t>(u(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(u(4)); }
  std::uint64_t u64() { return u(8); }
  double f64() {
    const std::uint64_t bits = u(8);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  void raw(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    return m;
  }
  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = f64();
    return v;
  }
  bool exhausted() const { return pos_ == data_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::uint64_t u(int bytes) {
    need(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += bytes;
    return v;
  }
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) throw IoError("truncated file: " + path_);
  }
  std::string path_;
  std::string data_;
  std::size_t pos_ = 0;
};

inline Role read_header(Reader& r, Eigen::Index& rows, Eigen::Index& cols) {
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "CROM", 4) != 0) throw IoError("bad magic in " + r.path());
  const std::uint16_t version = r.u16();
  if (version != kFormatVersion)
    throw IoError("unsupported format version in " + r.path());
  const Role role = static_cast<Role>(r.u16());
  rows = static_cast<Eigen::Index>(r.u64());
  cols = static_cast<Eigen::Index>(r.u64());
  return role;
}

inline void header(std::string& buf, Role role, std::uint64_t rows, std::uint64_t cols) {
  buf.append("CROM", 4);
  put_u16(buf, kFormatVersion);
  put_u16(buf, static_cast<std::uint16_t>(role));
  put_u64(buf, rows);
  put_u64(buf, cols);
}

}  // namespace detail

// Atomic write: temp sibling then rename.
inline void write_file(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

//------------------------------------------------------------------------------
// writers / readers per role
//------------------------------------------------------------------------------

inline void write_field(const std::string& path, const SpatioTemporalField& f) {
  std::string buf;
  buf.reserve(32 + 8 * (f.times.size() + f.values.size()));
  detail::header(buf, Role::field, f.n_times(), f.nx());
  detail::put_f64(buf, f.L);
  for (Eigen::Index j = 0; j < f.times.size(); ++j) detail::put_f64(buf, f.times[j]);
  // row = snapshot
  for (Eigen::Index j = 0; j < f.values.cols(); ++j)
    for (Eigen::Index i = 0; i < f.values.rows(); ++i) detail::put_f64(buf, f.values(i, j));
  write_file(path, buf);
}

inline SpatioTemporalField read_field(const std::string& path) {
  detail::Reader r(path);
  Eigen::Index rows, cols;
  if (detail::read_header(r, rows, cols) != Role::field)
    throw IoError(path + " is not a field file");
  SpatioTemporalField f;
  f.L = r.f64();
  f.times = r.vector(rows);
  f.values = r.matrix(rows, cols).transpose();
  return f;
}

inline void write_series(const std::string& path, const CoefficientSeries& s) {
  std::string buf;
  buf.reserve(40 + 8 * (s.times.size() + s.values.size()));
  detail::header(buf, Role::series, s.n_times(), s.size());
  detail::put_u64(buf, s.basis_id);
  for (Eigen::Index j = 0; j < s.times.size(); ++j) detail::put_f64(buf, s.times[j]);
  for (Eigen::Index j = 0; j < s.values.cols(); ++j)
    for (Eigen::Index i = 0; i < s.values.rows(); ++i) detail::put_f64(buf, s.values(i, j));
  write_file(path, buf);
}

inline CoefficientSeries read_series(const std::string& path) {
  detail::Reader r(path);
  Eigen::Index rows, cols;
  if (detail::read_header(r, rows, cols) != Role::series)
    throw IoError(path + " is not a series file");
  CoefficientSeries s;
  s.basis_id = r.u64();
  s.times = r.vector(rows);
  s.values = r.matrix(rows, cols).transpose();
  return s;
}

inline void write_model(const std::string& path, const QuadraticModel& m) {
  std::string buf;
  detail::header(buf, Role::model, m.n, m.noise.cols());
  detail::put_u16(buf, static_cast<std::uint16_t>(m.metadata));
  detail::put_matrix(buf, m.linear);
  for (int i = 0; i < m.n; ++i) detail::put_f64(buf, m.constant[i]);
  detail::put_matrix(buf, m.noise);
  detail::put_u64(buf, m.quadratic.size());
  for (const auto& t : m.quadratic) {
    detail::put_u32(buf, static_cast<std::uint32_t>(t.eq));
    detail::put_u32(buf, static_cast<std::uint32_t>(t.j));
    detail::put_u32(buf, static_cast<std::uint32_t>(t.k));
    detail::put_f64(buf, t.coef);
  }
  write_file(path, buf);
}

inline QuadraticModel read_model(const std::string& path) {
  detail::Reader r(path);
  Eigen::Index rows, cols;
  if (detail::read_header(r, rows, cols) != Role::model)
    throw IoError(path + " is not a model file");
  QuadraticModel m;
  m.n = static_cast<int>(rows);
  m.metadata = static_cast<ModelTag>(r.u16());
  m.linear = r.matrix(rows, rows);
  m.constant = r.vector(rows);
  m.noise = r.matrix(rows, cols);
  const std::uint64_t nq = r.u64();
  m.quadratic.reserve(nq);
  for (std::uint64_t t = 0; t < nq; ++t) {
    QuadTerm q;
    q.eq = static_cast<int>(r.u32());
    q.j = static_cast<int>(r.u32());
    q.k = static_cast<int>(r.u32());
    q.coef = r.f64();
    m.quadratic.push_back(q);
  }
  m.validate();
  return m;
}

inline void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::string buf;
  buf.reserve(32 + 8 * m.size());
  detail::header(buf, Role::matrix, m.rows(), m.cols());
  detail::put_matrix(buf, m);
  write_file(path, buf);
}

inline Eigen::MatrixXd read_matrix(const std::string& path) {
  detail::Reader r(path);
  Eigen::Index rows, cols;
  if (detail::read_header(r, rows, cols) != Role::matrix)
    throw IoError(path + " is not a matrix file");
  return r.matrix(rows, cols);
}

inline void write_basis(const std::string& path, const Basis& b) {
  std::string buf;
  detail::header(buf, Role::basis, b.size(), 2 * b.n_pairs);
  detail::put_u16(buf, static_cast<std::uint16_t>(b.kind));
  detail::put_f64(buf, b.L);
  detail::put_f64(buf, b.total_energy);
  for (int i = 0; i < b.size(); ++i) detail::put_f64(buf, b.eigenvalues[i]);
  detail::put_matrix(buf, b.coef);
  write_file(path, buf);
}

inline Basis read_basis(const std::string& path) {
  detail::Reader r(path);
  Eigen::Index rows, cols;
  if (detail::read_header(r, rows, cols) != Role::basis)
    throw IoError(path + " is not a basis file");
  Basis b;
  b.kind = static_cast<BasisKind>(r.u16());
  b.L = r.f64();
  b.total_energy = r.f64();
  b.eigenvalues = r.vector(rows);
  b.n_pairs = static_cast<int>(cols / 2);
  b.coef = r.matrix(rows, cols);
  return b;
}

//------------------------------------------------------------------------------
// CSV mirrors (deterministic %.17g formatting)
//------------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                             const std::vector<std::string>& column_names = {}) {
  std::string out;
  if (!column_names.empty()) {
    for (std::size_t c = 0; c < column_names.size(); ++c) {
      if (c) out += ',';
      out += column_names[c];
    }
    out += '\n';
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_file(path, out);
}

inline void write_series_csv(const std::string& path, const CoefficientSeries& s) {
  std::string out = "t";
  for (int i = 0; i < s.size(); ++i) out += ",a" + std::to_string(i + 1);
  out += '\n';
  for (long j = 0; j < s.n_times(); ++j) {
    out += format_double(s.times[j]);
    for (int i = 0; i < s.size(); ++i) {
      out += ',';
      out += format_double(s.values(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

inline void write_field_csv(const std::string& path, const SpatioTemporalField& f) {
  std::string out = "t";
  const Eigen::VectorXd grid = f.grid();
  for (int i = 0; i < f.nx(); ++i) out += ",x" + format_double(grid[i]);
  out += '\n';
  for (long j = 0; j < f.n_times(); ++j) {
    out += format_double(f.times[j]);
    for (int i = 0; i < f.nx(); ++i) {
      out += ',';
      out += format_double(f.values(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

inline void write_model_csv(const std::string& path, const QuadraticModel& m) {
  std::string out = "kind,eq,j,k,coef\n";
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      if (m.linear(i, j) != 0.0)
        out += "linear," + std::to_string(i + 1) + "," + std::to_string(j + 1) + ",," +
               format_double(m.linear(i, j)) + '\n';
  for (const auto& t : m.quadratic)
    out += "quadratic," + std::to_string(t.eq + 1) + "," + std::to_string(t.j + 1) + "," +
           std::to_string(t.k + 1) + "," + format_double(t.coef) + '\n';
  for (int i = 0; i < m.n; ++i)
    if (m.constant[i] != 0.0)
      out += "constant," + std::to_string(i + 1) + ",,," + format_double(m.constant[i]) + '\n';
  for (int i = 0; i < m.noise.rows(); ++i)
    for (int d = 0; d < m.noise.cols(); ++d)
      if (m.noise(i, d) != 0.0)
        out += "noise," + std::to_string(i + 1) + "," + std::to_string(d + 1) + ",," +
               format_double(m.noise(i, d)) + '\n';
  write_file(path, out);
}

}  // namespace crom::io
