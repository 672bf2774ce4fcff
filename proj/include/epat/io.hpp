#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epat/rays.hpp"
#include "epat/trace.hpp"

namespace epat::io {

namespace detail {

inline void write_doubles(std::ostream &os, const std::vector<double> &v) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (double d : v) {
      auto bits = std::bit_cast<std::uint64_t>(d);
      char buf[8];
      for (int k = 0; k < 8; ++k) buf[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
      os.write(buf, 8);
    }
  }
}

inline std::vector<double> read_doubles(std::istream &is, std::size_t n, const std::string &what) {
  std::vector<double> v(n);
  if constexpr (std::endian::native == std::endian::little) {
    is.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (static_cast<std::size_t>(is.gcount()) != n * sizeof(double))
      throw FormatError(what + ": truncated payload");
  } else {
    for (double &d : v) {
      unsigned char buf[8];
      is.read(reinterpret_cast<char *>(buf), 8);
      if (is.gcount() != 8) throw FormatError(what + ": truncated payload");
      std::uint64_t bits = 0;
      for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
      d = std::bit_cast<double>(bits);
    }
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError(what + ": trailing bytes after payload");
  return v;
}

inline nlohmann::json read_header(std::istream &is, const std::string &magic, const std::string &what) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError(what + ": missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception &) {
    throw FormatError(what + ": header is not a JSON record");
  }
  if (!h.is_object() || h.value("format", "") != magic)
    throw FormatError(what + ": not an " + magic + " file");
  return h;
}

template <class T> T field(const nlohmann::json &h, const char *key, const std::string &what) {
  try {
    return h.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw FormatError(what + ": header lacks a valid '" + key + "'");
  }
}

inline void grid_to_json(nlohmann::json &h, const Grid2D &g) {
  h["nx"] = g.nx;
  h["ny"] = g.ny;
  h["hx"] = g.hx;
  h["hy"] = g.hy;
  h["origin_x"] = g.x0;
  h["origin_y"] = g.y0;
}

inline Grid2D grid_from_json(const nlohmann::json &h, const std::string &what) {
  const int nx = field<int>(h, "nx", what), ny = field<int>(h, "ny", what);
  const double hx = field<double>(h, "hx", what), hy = field<double>(h, "hy", what);
  const double ox = field<double>(h, "origin_x", what), oy = field<double>(h, "origin_y", what);
  try {
    return Grid2D(nx, ny, hx, hy, ox, oy);
  } catch (const ConfigError &e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline std::ifstream open_in(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return is;
}
inline std::ofstream open_out(const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write '" + path + "'");
  return os;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace detail

// EPF1: one JSON header line, then nx*ny little-endian float64 values, y outer.

inline void write_field(std::ostream &os, const ScalarField &f) {
  nlohmann::json h;
  h["format"] = "EPF1";
  detail::grid_to_json(h, f.grid());
  os << h.dump() << '\n';
  detail::write_doubles(os, f.data());
}

inline ScalarField read_field(std::istream &is, const std::string &what = "EPF1") {
  const auto h = detail::read_header(is, "EPF1", what);
  const Grid2D g = detail::grid_from_json(h, what);
  auto v = detail::read_doubles(is, g.size(), what);
  for (double d : v)
    if (!std::isfinite(d)) throw FormatError(what + ": non-finite value");
  return ScalarField(g, std::move(v));
}

inline void save_field(const std::string &path, const ScalarField &f) {
  auto os = detail::open_out(path);
  write_field(os, f);
}
inline ScalarField load_field(const std::string &path) {
  auto is = detail::open_in(path);
  return read_field(is, path);
}

// EPT1: JSON header line, one "index,face,lambda,gamma" line per boundary
// node, then (nt+1)*n_boundary_nodes little-endian float64 values, time outer.

inline void write_trace(std::ostream &os, const BoundaryTrace &tr) {
  const BoundarySpec &bnd = tr.boundary();
  nlohmann::json h;
  h["format"] = "EPT1";
  h["nt"] = tr.nt();
  h["dt"] = tr.times().dt;
  h["n_boundary_nodes"] = bnd.size();
  detail::grid_to_json(h, bnd.grid());
  os << h.dump() << '\n';
  for (std::size_t b = 0; b < bnd.size(); ++b)
    os << bnd.node(b).index << ',' << static_cast<int>(bnd.node(b).face) << ','
       << detail::fmt(bnd.lambda(b)) << ',' << (bnd.in_gamma(b) ? 1 : 0) << '\n';
  detail::write_doubles(os, tr.data());
}

inline BoundaryTrace read_trace(std::istream &is, const std::string &what = "EPT1") {
  const auto h = detail::read_header(is, "EPT1", what);
  const Grid2D g = detail::grid_from_json(h, what);
  const int nt = detail::field<int>(h, "nt", what);
  const double dt = detail::field<double>(h, "dt", what);
  const auto nb = detail::field<std::size_t>(h, "n_boundary_nodes", what);
  const auto nodes = enumerate_boundary(g);
  if (nb != nodes.size()) throw FormatError(what + ": node count does not match the grid");
  std::vector<double> lambda(nb);
  std::vector<std::uint8_t> gamma(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError(what + ": truncated node table");
    std::istringstream ls(line);
    std::size_t index = 0;
    int face = 0, gm = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ls >> index >> c1 >> face >> c2 >> lambda[b] >> c3 >> gm) || c1 != ',' || c2 != ',' || c3 != ',')
      throw FormatError(what + ": malformed node table line " + std::to_string(b));
    if (index != nodes[b].index || face != static_cast<int>(nodes[b].face) || (gm != 0 && gm != 1))
      throw FormatError(what + ": node table disagrees with the grid's boundary enumeration");
    gamma[b] = static_cast<std::uint8_t>(gm);
  }
  TimeAxis times;
  std::shared_ptr<const BoundarySpec> bnd;
  try {
    times = TimeAxis(dt, nt);
    bnd = std::make_shared<const BoundarySpec>(g, std::move(lambda), std::move(gamma));
  } catch (const Error &e) {
    throw FormatError(what + ": " + e.what());
  }
  auto v = detail::read_doubles(is, (static_cast<std::size_t>(nt) + 1) * nb, what);
  for (double d : v)
    if (!std::isfinite(d)) throw FormatError(what + ": non-finite value");
  return BoundaryTrace(std::move(bnd), times, std::move(v));
}

inline void save_trace(const std::string &path, const BoundaryTrace &tr) {
  auto os = detail::open_out(path);
  write_trace(os, tr);
}
inline BoundaryTrace load_trace(const std::string &path) {
  auto is = detail::open_in(path);
  return read_trace(is, path);
}

/// Binary greyscale image, top row = largest y, linear min-max scaling.
inline void write_pgm(std::ostream &os, const ScalarField &f) {
  const Grid2D &g = f.grid();
  const double lo = f.min(), hi = f.max();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  os << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
  std::vector<unsigned char> row(g.nx);
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i)
      row[i] = static_cast<unsigned char>(std::lround((f(i, j) - lo) * scale));
    os.write(reinterpret_cast<const char *>(row.data()), g.nx);
  }
}
inline void save_pgm(const std::string &path, const ScalarField &f) {
  auto os = detail::open_out(path);
  write_pgm(os, f);
}

/// Comma-separated table with a header row.
class CsvWriter {
public:
  CsvWriter(std::ostream &os, std::initializer_list<std::string> header) : os_(os) {
    bool first = true;
    for (const auto &h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << '\n';
  }
  template <class... T> void row(const T &...vals) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(vals), first = false), ...);
    os_ << '\n';
  }

private:
  static std::string cell(double v) { return detail::fmt(v); }
  static std::string cell(const std::string &s) { return s; }
  static std::string cell(const char *s) { return s; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }
  std::ostream &os_;
};

inline void write_ray_report(std::ostream &os, const RayReport &rep) {
  CsvWriter csv(os, {"x", "y", "angle", "reached", "hit_time", "hit_face", "reflections", "grazing"});
  for (const RayRecord &r : rep.rays)
    csv.row(r.x, r.y, r.angle, r.reached ? 1 : 0, r.reached ? r.hit_time : std::nan(""),
            r.reached ? face_name(r.hit_face) : "", r.reflections, r.grazing ? 1 : 0);
}

/// Key-value summary block.
inline void write_ray_summary(std::ostream &os, const RaySummary &s) {
  os << "fraction_reached=" << detail::fmt(s.fraction_reached) << '\n'
     << "tau_hat=" << (s.tau_hat ? detail::fmt(*s.tau_hat) : std::string("none")) << '\n'
     << "grazing_count=" << s.grazing_count << '\n';
}

} // namespace epat::io
