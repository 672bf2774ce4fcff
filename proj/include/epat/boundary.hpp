#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "epat/grid.hpp"

namespace epat {

enum class Face : std::uint8_t { bottom = 0, right = 1, top = 2, left = 3 };

inline const char *face_name(Face f) {
  switch (f) {
  case Face::bottom: return "bottom";
  case Face::right: return "right";
  case Face::top: return "top";
  case Face::left: return "left";
  }
  return "?";
}

inline Face parse_face(std::string_view s) {
  if (s == "bottom") return Face::bottom;
  if (s == "right") return Face::right;
  if (s == "top") return Face::top;
  if (s == "left") return Face::left;
  throw FormatError("unknown face '" + std::string(s) + "'");
}

/// One node of the discrete boundary. Corner nodes carry both normals.
struct BoundaryNode {
  std::size_t index = 0; // linear grid index
  int i = 0;
  int j = 0;
  Face face = Face::bottom; // first face met in counter-clockwise order
  int normal_x = 0;         // outward normal component along x: -1, 0, +1
  int normal_y = 0;
  double ds = 0.0;    // arc-length quadrature weight
  double ghost = 0.0; // ghost-node source factor: 2/hx per x-face + 2/hy per y-face

  bool is_corner() const { return normal_x != 0 && normal_y != 0; }
  bool on(Face f) const {
    switch (f) {
    case Face::bottom: return normal_y < 0;
    case Face::top: return normal_y > 0;
    case Face::left: return normal_x < 0;
    case Face::right: return normal_x > 0;
    }
    return false;
  }
};

/// Counter-clockwise enumeration of the boundary nodes starting at (0,0).
inline std::vector<BoundaryNode> enumerate_boundary(const Grid2D &g) {
  std::vector<BoundaryNode> out;
  out.reserve(2 * (g.nx + g.ny) - 4);
  auto add = [&](int i, int j, Face f) {
    BoundaryNode n;
    n.index = g.index(i, j);
    n.i = i;
    n.j = j;
    n.face = f;
    n.normal_x = i == 0 ? -1 : (i == g.nx - 1 ? 1 : 0);
    n.normal_y = j == 0 ? -1 : (j == g.ny - 1 ? 1 : 0);
    const bool corner = n.normal_x != 0 && n.normal_y != 0;
    const double share = corner ? 0.5 : 1.0;
    if (n.normal_x != 0) {
      n.ds += share * g.hy;
      n.ghost += 2.0 / g.hx;
    }
    if (n.normal_y != 0) {
      n.ds += share * g.hx;
      n.ghost += 2.0 / g.hy;
    }
    out.push_back(n);
  };
  for (int i = 0; i < g.nx; ++i) add(i, 0, Face::bottom);
  for (int j = 1; j < g.ny; ++j) add(g.nx - 1, j, Face::right);
  for (int i = g.nx - 2; i >= 0; --i) add(i, g.ny - 1, Face::top);
  for (int j = g.ny - 2; j >= 1; --j) add(0, j, Face::left);
  return out;
}

/// Grid-independent description of a piecewise-constant boundary function,
/// written in a small language:
///
///   full:v                      whole boundary
///   faces:right,top:v           listed faces
///   arc:left,0.2,0.6:v          sub-interval of a face, parameter in [0,1]
///                               measured along +x (bottom/top) or +y
///                               (left/right)
///   none                        zero everywhere
///
/// Terms can be joined with '+'; a later term overrides an earlier one where
/// both cover a point. The value may be omitted (defaults to 1), which makes
/// the same syntax usable for observation-set masks.
class BoundaryProfile {
public:
  struct Segment {
    Face face;
    double s0 = 0.0;
    double s1 = 1.0;
    double value = 1.0;
  };

  BoundaryProfile() = default;
  explicit BoundaryProfile(std::vector<Segment> segs) : segs_(std::move(segs)) {}

  static BoundaryProfile constant(double v) {
    std::vector<Segment> s;
    for (int f = 0; f < 4; ++f) s.push_back({static_cast<Face>(f), 0.0, 1.0, v});
    return BoundaryProfile(std::move(s));
  }
  static BoundaryProfile faces(std::initializer_list<Face> fs, double v) {
    std::vector<Segment> s;
    for (Face f : fs) s.push_back({f, 0.0, 1.0, v});
    return BoundaryProfile(std::move(s));
  }

  static BoundaryProfile parse(std::string_view text) {
    std::vector<Segment> segs;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t plus = text.find('+', pos);
      std::string_view term =
          text.substr(pos, plus == std::string_view::npos ? text.npos : plus - pos);
      parse_term(trim(term), segs);
      if (plus == std::string_view::npos) break;
      pos = plus + 1;
    }
    return BoundaryProfile(std::move(segs));
  }

  const std::vector<Segment> &segments() const { return segs_; }

  /// Value at a point given by face and normalised parameter.
  double value(Face f, double s) const {
    double v = 0.0;
    for (const Segment &seg : segs_)
      if (seg.face == f && s >= seg.s0 - 1e-12 && s <= seg.s1 + 1e-12) v = seg.value;
    return v;
  }

  /// Value at a boundary node. Corners take the value of whichever of their
  /// two faces a later term covers (max over faces if neither overrides).
  double value(const Grid2D &g, const BoundaryNode &n) const {
    double v = 0.0;
    for (const Segment &seg : segs_) {
      for (int f = 0; f < 4; ++f) {
        const Face face = static_cast<Face>(f);
        if (seg.face != face || !n.on(face)) continue;
        const double s = param(g, n, face);
        if (s >= seg.s0 - 1e-12 && s <= seg.s1 + 1e-12) v = seg.value;
      }
    }
    return v;
  }

  static double param(const Grid2D &g, const BoundaryNode &n, Face f) {
    return (f == Face::bottom || f == Face::top)
               ? static_cast<double>(n.i) / (g.nx - 1)
               : static_cast<double>(n.j) / (g.ny - 1);
  }

private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }
  static std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == sep) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    out.push_back(cur);
    return out;
  }
  static double number(const std::string &s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw FormatError("bad number '" + s + "'");
      return v;
    } catch (const std::logic_error &) {
      throw FormatError("bad number '" + s + "'");
    }
  }
  static void parse_term(std::string_view term, std::vector<Segment> &segs) {
    if (term == "none" || term.empty()) return;
    auto parts = split(term, ':');
    const std::string kind = parts[0];
    double v = 1.0;
    auto value_at = [&](std::size_t k) {
      if (parts.size() > k) v = number(parts[k]);
      if (parts.size() > k + 1) throw FormatError("trailing text in '" + std::string(term) + "'");
      if (v < 0.0 || !std::isfinite(v)) throw FormatError("boundary values must be finite and >= 0");
    };
    if (kind == "full") {
      value_at(1);
      for (int f = 0; f < 4; ++f) segs.push_back({static_cast<Face>(f), 0.0, 1.0, v});
    } else if (kind == "faces") {
      if (parts.size() < 2) throw FormatError("faces: needs a face list");
      value_at(2);
      for (const std::string &name : split(parts[1], ','))
        segs.push_back({parse_face(name), 0.0, 1.0, v});
    } else if (kind == "arc") {
      if (parts.size() < 2) throw FormatError("arc: needs face,start,end");
      auto a = split(parts[1], ',');
      if (a.size() != 3) throw FormatError("arc: needs face,start,end");
      value_at(2);
      const double s0 = number(a[1]), s1 = number(a[2]);
      if (!(s0 >= 0.0 && s1 <= 1.0 && s0 <= s1)) throw FormatError("arc: need 0 <= start <= end <= 1");
      segs.push_back({parse_face(a[0]), s0, s1, v});
    } else {
      throw FormatError("unknown boundary term '" + std::string(term) + "'");
    }
  }

  std::vector<Segment> segs_;
};

/// Boundary nodes together with impedance values and the observed subset.
class BoundarySpec {
public:
  BoundarySpec() = default;

  /// Observation set defaults to {lambda > 0}.
  BoundarySpec(const Grid2D &g, std::vector<double> lambda)
      : grid_(g), nodes_(enumerate_boundary(g)), lambda_(std::move(lambda)) {
    gamma_.resize(nodes_.size());
    for (std::size_t b = 0; b < nodes_.size() && b < lambda_.size(); ++b)
      gamma_[b] = lambda_[b] > 0.0;
    validate();
  }
  BoundarySpec(const Grid2D &g, std::vector<double> lambda, std::vector<std::uint8_t> gamma)
      : grid_(g), nodes_(enumerate_boundary(g)), lambda_(std::move(lambda)),
        gamma_(std::move(gamma)) {
    validate();
  }

  static BoundarySpec from_profiles(const Grid2D &g, const BoundaryProfile &lambda) {
    const auto nodes = enumerate_boundary(g);
    std::vector<double> lam(nodes.size());
    for (std::size_t b = 0; b < nodes.size(); ++b) lam[b] = lambda.value(g, nodes[b]);
    return BoundarySpec(g, std::move(lam));
  }
  /// Observation set is the union of `gamma` coverage and {lambda > 0}.
  static BoundarySpec from_profiles(const Grid2D &g, const BoundaryProfile &lambda,
                                    const BoundaryProfile &gamma) {
    const auto nodes = enumerate_boundary(g);
    std::vector<double> lam(nodes.size());
    std::vector<std::uint8_t> gm(nodes.size());
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      lam[b] = lambda.value(g, nodes[b]);
      gm[b] = gamma.value(g, nodes[b]) > 0.0 || lam[b] > 0.0;
    }
    return BoundarySpec(g, std::move(lam), std::move(gm));
  }

  const Grid2D &grid() const { return grid_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<BoundaryNode> &nodes() const { return nodes_; }
  const BoundaryNode &node(std::size_t b) const { return nodes_[b]; }
  const std::vector<double> &lambda() const { return lambda_; }
  double lambda(std::size_t b) const { return lambda_[b]; }
  const std::vector<std::uint8_t> &gamma() const { return gamma_; }
  bool in_gamma(std::size_t b) const { return gamma_[b] != 0; }

  bool gamma_empty() const {
    return std::none_of(gamma_.begin(), gamma_.end(), [](auto g) { return g != 0; });
  }
  bool lambda_zero() const {
    return std::all_of(lambda_.begin(), lambda_.end(), [](double l) { return l == 0.0; });
  }
  /// True when the observed set coincides with {lambda > 0}.
  bool gamma_is_support_of_lambda() const {
    for (std::size_t b = 0; b < size(); ++b)
      if ((lambda_[b] > 0.0) != in_gamma(b)) return false;
    return true;
  }
  /// Boundary integral of lambda.
  double lambda_integral() const {
    double s = 0.0;
    for (std::size_t b = 0; b < size(); ++b) s += lambda_[b] * nodes_[b].ds;
    return s;
  }
  double perimeter() const {
    double s = 0.0;
    for (const auto &n : nodes_) s += n.ds;
    return s;
  }

  /// Boundary node closest to a point on face `f` at normalised parameter s.
  std::size_t nearest_node(Face f, double s) const {
    const int n_along = (f == Face::bottom || f == Face::top) ? grid_.nx : grid_.ny;
    const int k = std::clamp(static_cast<int>(std::lround(s * (n_along - 1))), 0, n_along - 1);
    int i = 0, j = 0;
    switch (f) {
    case Face::bottom: i = k; j = 0; break;
    case Face::top: i = k; j = grid_.ny - 1; break;
    case Face::left: i = 0; j = k; break;
    case Face::right: i = grid_.nx - 1; j = k; break;
    }
    return slot_of(i, j);
  }

  /// Position of grid node (i, j) in the boundary enumeration.
  std::size_t slot_of(int i, int j) const {
    const int nx = grid_.nx, ny = grid_.ny;
    if (j == 0) return static_cast<std::size_t>(i);
    if (i == nx - 1) return static_cast<std::size_t>(nx - 1 + j);
    if (j == ny - 1) return static_cast<std::size_t>(nx - 1 + ny - 1 + (nx - 1 - i));
    if (i == 0) return static_cast<std::size_t>(2 * (nx - 1) + ny - 1 + (ny - 1 - j));
    throw ContractError("node is not on the boundary");
  }

  friend bool operator==(const BoundarySpec &a, const BoundarySpec &b) {
    return a.grid_ == b.grid_ && a.lambda_ == b.lambda_ && a.gamma_ == b.gamma_;
  }

private:
  void validate() const {
    grid_.validate();
    detail::require<DimensionError>(lambda_.size() == nodes_.size(),
                                    "lambda must have one value per boundary node");
    detail::require<DimensionError>(gamma_.size() == nodes_.size(),
                                    "gamma mask must have one flag per boundary node");
    for (std::size_t b = 0; b < nodes_.size(); ++b) {
      detail::require<ContractError>(std::isfinite(lambda_[b]) && lambda_[b] >= 0.0,
                                     "impedance must be finite and non-negative");
      detail::require<ContractError>(lambda_[b] == 0.0 || gamma_[b] != 0,
                                     "{lambda > 0} must lie inside the observed set");
    }
  }

  Grid2D grid_;
  std::vector<BoundaryNode> nodes_;
  std::vector<double> lambda_;
  std::vector<std::uint8_t> gamma_;
};

} // namespace epat
