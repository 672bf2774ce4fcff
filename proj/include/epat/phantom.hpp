#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "epat/medium.hpp"
#include "epat/trace.hpp"

namespace epat {

namespace detail {

inline std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out(1);
  for (char ch : s) {
    if (ch == sep)
      out.emplace_back();
    else if (!std::isspace(static_cast<unsigned char>(ch)))
      out.back().push_back(ch);
  }
  return out;
}

inline double parse_number(const std::string &s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error &) {
  }
  throw FormatError("bad number '" + s + "'");
}

inline std::vector<double> parse_numbers(std::string_view s) {
  std::vector<double> out;
  if (s.empty()) return out;
  for (const std::string &tok : split_on(s, ',')) out.push_back(parse_number(tok));
  return out;
}

/// Quintic smoothstep on [0, 1], C2 at both ends.
inline double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

} // namespace detail

enum class PhantomKind { gaussian_bumps, disks, smoothed_disks };

/// One inclusion. `radius` is the standard deviation for Gaussian bumps and
/// the radius for disks.
struct Blob {
  double x = 0.5, y = 0.5, radius = 0.1, amplitude = 1.0;
};

struct PhantomSpec {
  PhantomKind kind = PhantomKind::gaussian_bumps;
  std::vector<Blob> blobs;
  /// Half-width of the edge ramp of smoothed disks.
  double smoothing = 0.02;

  /// Extent beyond the centre at which a blob is treated as zero.
  double support_radius(const Blob &b) const {
    switch (kind) {
    case PhantomKind::gaussian_bumps: return 4.0 * b.radius;
    case PhantomKind::disks: return b.radius;
    case PhantomKind::smoothed_disks: return b.radius + smoothing;
    }
    return b.radius;
  }

  double value(double x, double y) const {
    double v = 0.0;
    for (const Blob &b : blobs) {
      const double r2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
      switch (kind) {
      case PhantomKind::gaussian_bumps:
        v += b.amplitude * std::exp(-r2 / (2.0 * b.radius * b.radius));
        break;
      case PhantomKind::disks:
        if (r2 <= b.radius * b.radius) v += b.amplitude;
        break;
      case PhantomKind::smoothed_disks: {
        const double r = std::sqrt(r2);
        v += b.amplitude * detail::smoothstep((b.radius + smoothing - r) / (2.0 * smoothing));
        break;
      }
      }
    }
    return v;
  }

  /// `count` blobs with centres in the middle 40% of the rectangle and
  /// amplitudes in [0.5, 1]. Relative to the shorter side, disk radii lie in
  /// [0.05, 0.1] and bump widths in [0.025, 0.04].
  static PhantomSpec random(PhantomKind kind, int count, std::uint64_t seed, const Grid2D &g) {
    detail::require<ConfigError>(count >= 1, "random phantom needs at least one blob");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PhantomSpec spec;
    spec.kind = kind;
    const double lmin = std::min(g.lx(), g.ly());
    for (int m = 0; m < count; ++m) {
      Blob b;
      b.x = g.x0 + (0.3 + 0.4 * u(rng)) * g.lx();
      b.y = g.y0 + (0.3 + 0.4 * u(rng)) * g.ly();
      b.radius = (kind == PhantomKind::gaussian_bumps ? 0.025 + 0.015 * u(rng) : 0.05 + 0.05 * u(rng)) * lmin;
      b.amplitude = 0.5 + 0.5 * u(rng);
      spec.blobs.push_back(b);
    }
    if (kind == PhantomKind::smoothed_disks) spec.smoothing = 0.03 * lmin;
    return spec;
  }

  /// Text form: `gauss:x,y,r,a;x,y,r,a`, `disk:...`, `sdisk:...[@w]` or
  /// `random:kind,count,seed` (random needs the grid for placement).
  static PhantomSpec parse(std::string_view text, const Grid2D &g) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) throw FormatError("phantom spec needs 'kind:params'");
    const std::string kind(text.substr(0, colon));
    std::string_view rest = text.substr(colon + 1);
    if (kind == "random") {
      auto parts = detail::split_on(rest, ',');
      if (parts.size() != 3) throw FormatError("random phantom needs kind,count,seed");
      return random(parse_kind(parts[0]), static_cast<int>(detail::parse_number(parts[1])),
                    static_cast<std::uint64_t>(detail::parse_number(parts[2])), g);
    }
    PhantomSpec spec;
    spec.kind = parse_kind(kind);
    const std::size_t at = rest.find('@');
    if (at != std::string_view::npos) {
      spec.smoothing = detail::parse_number(std::string(rest.substr(at + 1)));
      rest = rest.substr(0, at);
    }
    for (const std::string &blob : detail::split_on(rest, ';')) {
      auto v = detail::parse_numbers(blob);
      if (v.size() != 4) throw FormatError("each blob needs x,y,radius,amplitude");
      spec.blobs.push_back({v[0], v[1], v[2], v[3]});
    }
    return spec;
  }

  static PhantomKind parse_kind(const std::string &s) {
    if (s == "gauss" || s == "gaussian") return PhantomKind::gaussian_bumps;
    if (s == "disk") return PhantomKind::disks;
    if (s == "sdisk") return PhantomKind::smoothed_disks;
    throw FormatError("unknown phantom kind '" + s + "'");
  }
};

/// Samples a phantom, rejecting blobs whose support comes within two cells
/// of the boundary.
inline ScalarField make_phantom(const PhantomSpec &spec, const Grid2D &g) {
  g.validate();
  for (const Blob &b : spec.blobs) {
    detail::require<ConfigError>(b.radius > 0.0 && std::isfinite(b.amplitude),
                                 "phantom blobs need a positive radius and finite amplitude");
    if (b.amplitude == 0.0) continue;
    const double r = spec.support_radius(b);
    const bool inside = b.x - r >= g.x0 + 2.0 * g.hx && b.x + r <= g.x0 + g.lx() - 2.0 * g.hx &&
                        b.y - r >= g.y0 + 2.0 * g.hy && b.y + r <= g.y0 + g.ly() - 2.0 * g.hy;
    if (!inside) throw ContractError("phantom support reaches the two-cell boundary margin");
  }
  if (spec.kind == PhantomKind::smoothed_disks)
    detail::require<ConfigError>(spec.smoothing > 0.0, "smoothing width must be positive");
  return ScalarField::sample(g, [&](double x, double y) { return spec.value(x, y); });
}

enum class MediumKind { constant, linear_gradient, lens, random_smooth };

/// Analytic sound speed with gradient, plus a constant potential.
struct MediumSpec {
  MediumKind kind = MediumKind::constant;
  double c0 = 1.0;
  /// gradient: c1 is the speed on the far side; lens: amplitude.
  double c1 = 1.0;
  /// gradient direction in degrees; lens width.
  double angle_deg = 0.0;
  double sigma = 0.15;
  /// lens centre, in units of the domain extent.
  double cx = 0.5, cy = 0.5;
  std::uint64_t seed = 0;
  double q = 0.0;
  /// Domain used to normalise coordinates.
  double x0 = 0.0, y0 = 0.0, lx = 1.0, ly = 1.0;

  struct Bump { double x, y, s, a; };
  std::vector<Bump> bumps; // random_smooth only

  static MediumSpec constant(double c, double q = 0.0) {
    MediumSpec m;
    m.c0 = c;
    m.q = q;
    return m;
  }
  /// c = c0 + amplitude exp(-|x - centre|^2 / sigma^2).
  static MediumSpec lens(double c0, double amplitude, double sigma, double cx = 0.5, double cy = 0.5) {
    MediumSpec m;
    m.kind = MediumKind::lens;
    m.c0 = c0;
    m.c1 = amplitude;
    m.sigma = sigma;
    m.cx = cx;
    m.cy = cy;
    return m;
  }
  /// Linear ramp from c0 to c1 across the domain along `angle_deg`.
  static MediumSpec gradient(double c0, double c1, double angle_deg = 0.0) {
    MediumSpec m;
    m.kind = MediumKind::linear_gradient;
    m.c0 = c0;
    m.c1 = c1;
    m.angle_deg = angle_deg;
    return m;
  }
  /// Speed in (cmin, cmax) from a logistic squash of random Gaussian bumps.
  static MediumSpec random_smooth(double cmin, double cmax, std::uint64_t seed) {
    MediumSpec m;
    m.kind = MediumKind::random_smooth;
    m.c0 = cmin;
    m.c1 = cmax;
    m.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 6; ++k)
      m.bumps.push_back({u(rng), u(rng), 0.15 + 0.2 * u(rng), 4.0 * u(rng) - 2.0});
    return m;
  }

  /// `constant:c`, `gradient:c0,c1[,deg]`, `lens:c0,amp,sigma[,x,y]`,
  /// `random:cmin,cmax,seed`, optionally followed by `;q=value`.
  static MediumSpec parse(std::string_view text) {
    double qv = 0.0;
    const std::size_t semi = text.find(';');
    if (semi != std::string_view::npos) {
      std::string_view tail = text.substr(semi + 1);
      if (tail.substr(0, 2) != "q=") throw FormatError("medium suffix must be ';q=value'");
      qv = detail::parse_number(std::string(tail.substr(2)));
      text = text.substr(0, semi);
    }
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) throw FormatError("medium spec needs 'kind:params'");
    const std::string kind(text.substr(0, colon));
    auto v = detail::parse_numbers(text.substr(colon + 1));
    MediumSpec m;
    if (kind == "constant" && v.size() == 1) {
      m = constant(v[0]);
    } else if (kind == "gradient" && (v.size() == 2 || v.size() == 3)) {
      m = gradient(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
    } else if (kind == "lens" && (v.size() == 3 || v.size() == 5)) {
      m = v.size() == 5 ? lens(v[0], v[1], v[2], v[3], v[4]) : lens(v[0], v[1], v[2]);
    } else if (kind == "random" && v.size() == 3) {
      m = random_smooth(v[0], v[1], static_cast<std::uint64_t>(v[2]));
    } else {
      throw FormatError("bad medium spec '" + std::string(text) + "'");
    }
    m.q = qv;
    m.validate();
    return m;
  }

  void validate() const {
    detail::require<ConfigError>(q >= 0.0, "potential must be non-negative");
    switch (kind) {
    case MediumKind::constant: detail::require<ConfigError>(c0 > 0.0, "speed must be positive"); break;
    case MediumKind::linear_gradient:
      detail::require<ConfigError>(c0 > 0.0 && c1 > 0.0, "speed must be positive");
      break;
    case MediumKind::lens:
      detail::require<ConfigError>(sigma > 0.0, "lens width must be positive");
      detail::require<ConfigError>(c0 > 0.0 && c0 + std::min(c1, 0.0) > 0.0, "speed must be positive");
      break;
    case MediumKind::random_smooth:
      detail::require<ConfigError>(c0 > 0.0 && c1 >= c0, "need 0 < cmin <= cmax");
      break;
    }
  }

  /// Rescales normalised coordinates to the given rectangle.
  MediumSpec on(const Grid2D &g) const {
    MediumSpec m = *this;
    m.x0 = g.x0;
    m.y0 = g.y0;
    m.lx = g.lx();
    m.ly = g.ly();
    return m;
  }

  double speed(double x, double y) const { return eval(x, y).c; }
  std::array<double, 2> speed_gradient(double x, double y) const {
    const auto e = eval(x, y);
    return {e.cx, e.cy};
  }

  MediumParams sample(const Grid2D &g) const {
    const MediumSpec m = on(g);
    return MediumParams(ScalarField::sample(g, [&](double x, double y) { return m.speed(x, y); }),
                        ScalarField(g, q));
  }

private:
  struct Eval { double c, cx, cy; };

  Eval eval(double x, double y) const {
    const double sx = (x - x0) / lx, sy = (y - y0) / ly;
    switch (kind) {
    case MediumKind::constant: return {c0, 0.0, 0.0};
    case MediumKind::linear_gradient: {
      const double a = angle_deg * 3.141592653589793 / 180.0;
      const double dx = std::cos(a), dy = std::sin(a);
      // Projection normalised so the ramp spans the domain along (dx, dy).
      const double span = std::abs(dx) + std::abs(dy);
      const double lo = std::min(0.0, dx) + std::min(0.0, dy);
      const double t = (sx * dx + sy * dy - lo) / span;
      const double dc = c1 - c0;
      return {c0 + dc * t, dc * dx / span / lx, dc * dy / span / ly};
    }
    case MediumKind::lens: {
      const double ux = sx - cx, uy = sy - cy;
      const double e = c1 * std::exp(-(ux * ux + uy * uy) / (sigma * sigma));
      return {c0 + e, -2.0 * ux / (sigma * sigma) * e / lx, -2.0 * uy / (sigma * sigma) * e / ly};
    }
    case MediumKind::random_smooth: {
      double f = 0.0, fx = 0.0, fy = 0.0;
      for (const Bump &b : bumps) {
        const double ux = sx - b.x, uy = sy - b.y;
        const double e = b.a * std::exp(-(ux * ux + uy * uy) / (b.s * b.s));
        f += e;
        fx += -2.0 * ux / (b.s * b.s) * e;
        fy += -2.0 * uy / (b.s * b.s) * e;
      }
      const double sgm = 1.0 / (1.0 + std::exp(-f));
      const double d = (c1 - c0) * sgm * (1.0 - sgm);
      return {c0 + (c1 - c0) * sgm, d * fx / lx, d * fy / ly};
    }
    }
    return {c0, 0.0, 0.0};
  }
};

struct NoiseSpec {
  /// Standard deviation relative to the RMS of the trace on the observed set.
  double level = 0.0;
  std::uint64_t seed = 0;
};

/// Root mean square over the observed set.
inline double trace_rms(const BoundaryTrace &d) {
  const BoundarySpec &bnd = d.boundary();
  double s = 0.0;
  std::size_t n = 0;
  for (int k = 0; k <= d.nt(); ++k)
    for (std::size_t b = 0; b < bnd.size(); ++b)
      if (bnd.in_gamma(b)) {
        s += d(k, b) * d(k, b);
        ++n;
      }
  return n ? std::sqrt(s / n) : 0.0;
}

inline BoundaryTrace add_noise(const BoundaryTrace &d, const NoiseSpec &spec) {
  detail::require<ConfigError>(spec.level >= 0.0 && std::isfinite(spec.level),
                               "noise level must be >= 0");
  BoundaryTrace out = d;
  if (spec.level == 0.0) return out;
  const double sd = spec.level * trace_rms(d);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const BoundarySpec &bnd = d.boundary();
  for (int k = 0; k <= d.nt(); ++k)
    for (std::size_t b = 0; b < bnd.size(); ++b) {
      const double z = n01(rng);
      if (bnd.in_gamma(b)) out(k, b) += sd * z;
    }
  return out;
}

/// Catmull-Rom bicubic interpolation onto a grid covering the same
/// rectangle. Exact at coincident nodes.
inline ScalarField interpolate(const ScalarField &f, const Grid2D &target) {
  const Grid2D &g = f.grid();
  detail::require<DimensionError>(std::abs(g.lx() - target.lx()) <= 1e-12 * g.lx() &&
                                      std::abs(g.ly() - target.ly()) <= 1e-12 * g.ly() &&
                                      std::abs(g.x0 - target.x0) <= 1e-12 * g.lx() &&
                                      std::abs(g.y0 - target.y0) <= 1e-12 * g.ly(),
                                  "interpolation target must cover the same rectangle");
  auto weights = [](double t) {
    const double t2 = t * t, t3 = t2 * t;
    return std::array<double, 4>{0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2),
                                 0.5 * (-3 * t3 + 4 * t2 + t), 0.5 * (t3 - t2)};
  };
  return ScalarField::sample(target, [&](double x, double y) {
    const double fx = std::clamp((x - g.x0) / g.hx, 0.0, g.nx - 1.0);
    const double fy = std::clamp((y - g.y0) / g.hy, 0.0, g.ny - 1.0);
    const int i = std::min(static_cast<int>(fx), g.nx - 2), j = std::min(static_cast<int>(fy), g.ny - 2);
    const double tx = fx - i, ty = fy - j;
    if (std::abs(tx) < 1e-9 && std::abs(ty) < 1e-9) return f(i, j);
    if (std::abs(tx - 1.0) < 1e-9 && std::abs(ty) < 1e-9) return f(i + 1, j);
    if (std::abs(tx) < 1e-9 && std::abs(ty - 1.0) < 1e-9) return f(i, j + 1);
    if (std::abs(tx - 1.0) < 1e-9 && std::abs(ty - 1.0) < 1e-9) return f(i + 1, j + 1);
    const auto wx = weights(tx), wy = weights(ty);
    double v = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int jj = std::clamp(j - 1 + b, 0, g.ny - 1);
      double row = 0.0;
      for (int a = 0; a < 4; ++a) row += wx[a] * f(std::clamp(i - 1 + a, 0, g.nx - 1), jj);
      v += wy[b] * row;
    }
    return v;
  });
}

/// Samples a fine-grid trace at the nodes and instants of a coarse run.
/// The fine grid must be a refinement of the coarse grid by an integer
/// factor, and the fine step must divide the coarse step.
inline BoundaryTrace restrict_trace(const BoundaryTrace &fine,
                                    std::shared_ptr<const BoundarySpec> coarse_bnd,
                                    const TimeAxis &coarse_times) {
  const Grid2D &gf = fine.boundary().grid();
  const Grid2D &gc = coarse_bnd->grid();
  const int fx = (gf.nx - 1) / (gc.nx - 1), fy = (gf.ny - 1) / (gc.ny - 1);
  detail::require<DimensionError>(fx >= 1 && fy >= 1 && (gc.nx - 1) * fx == gf.nx - 1 &&
                                      (gc.ny - 1) * fy == gf.ny - 1,
                                  "fine grid is not an integer refinement of the coarse grid");
  const double ratio = coarse_times.dt / fine.times().dt;
  const int m = static_cast<int>(std::lround(ratio));
  detail::require<DimensionError>(m >= 1 && std::abs(ratio - m) < 1e-9 &&
                                      fine.nt() == m * coarse_times.nt,
                                  "fine time axis is not an integer refinement of the coarse one");
  BoundaryTrace out(coarse_bnd, coarse_times);
  const BoundarySpec &fb = fine.boundary();
  for (std::size_t b = 0; b < coarse_bnd->size(); ++b) {
    const BoundaryNode &n = coarse_bnd->node(b);
    const std::size_t fslot = fb.slot_of(n.i * fx, n.j * fy);
    if (!coarse_bnd->in_gamma(b)) continue;
    for (int k = 0; k <= coarse_times.nt; ++k) out(k, b) = fine(k * m, fslot);
  }
  return out;
}

} // namespace epat
