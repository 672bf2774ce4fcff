#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "epat/boundary.hpp"
#include "epat/grid.hpp"

namespace epat {

/// Position and momentum of a ray of the metric c^-2 |dx|^2, normalised so
/// that c |p| = 1.
struct RayState {
  double x = 0.0, y = 0.0, px = 0.0, py = 0.0;

  /// Unit-speed state leaving (x, y) at `angle` radians from the +x axis.
  template <class Medium> static RayState aimed(double x, double y, double angle, const Medium &med) {
    const double c = med.speed(x, y);
    return {x, y, std::cos(angle) / c, std::sin(angle) / c};
  }
};

/// H = (c^2 |p|^2 - 1) / 2.
template <class Medium> double hamiltonian(const RayState &s, const Medium &med) {
  const double c = med.speed(s.x, s.y);
  return 0.5 * (c * c * (s.px * s.px + s.py * s.py) - 1.0);
}

struct RayRecord {
  double x = 0.0, y = 0.0, angle = 0.0;
  bool reached = false;
  double hit_time = 0.0; // valid when reached
  Face hit_face = Face::bottom;
  int reflections = 0;
  bool grazing = false;
  double max_hamiltonian = 0.0;
};

struct RaySummary {
  std::size_t n_rays = 0;
  std::size_t n_reached = 0;
  std::size_t grazing_count = 0;
  double fraction_reached = 0.0;
  /// Largest non-grazing hit time; empty when no ray reached the observed set.
  std::optional<double> tau_hat;
};

struct RayReport {
  std::vector<RayRecord> rays;
  RaySummary summary;
};

/// Contacts closer than this to the tangent plane count as grazing.
inline constexpr double grazing_angle_deg = 5.0;

namespace detail {

template <class Medium> RayState ray_rhs(const RayState &s, const Medium &med) {
  const double c = med.speed(s.x, s.y);
  const auto g = med.speed_gradient(s.x, s.y);
  const double p2 = s.px * s.px + s.py * s.py;
  return {c * c * s.px, c * c * s.py, -c * g[0] * p2, -c * g[1] * p2};
}

template <class Medium> RayState rk4(const RayState &s, double h, const Medium &med) {
  auto add = [](const RayState &a, const RayState &k, double f) {
    return RayState{a.x + f * k.x, a.y + f * k.y, a.px + f * k.px, a.py + f * k.py};
  };
  const RayState k1 = ray_rhs(s, med);
  const RayState k2 = ray_rhs(add(s, k1, 0.5 * h), med);
  const RayState k3 = ray_rhs(add(s, k2, 0.5 * h), med);
  const RayState k4 = ray_rhs(add(s, k3, h), med);
  return {s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          s.px + h / 6.0 * (k1.px + 2.0 * k2.px + 2.0 * k3.px + k4.px),
          s.py + h / 6.0 * (k1.py + 2.0 * k2.py + 2.0 * k3.py + k4.py)};
}

struct Rect {
  double xlo, xhi, ylo, yhi;
  explicit Rect(const Grid2D &g) : xlo(g.x0), xhi(g.x0 + g.lx()), ylo(g.y0), yhi(g.y0 + g.ly()) {}
  bool contains(double x, double y) const { return x >= xlo && x <= xhi && y >= ylo && y <= yhi; }
  bool interior(double x, double y) const { return x > xlo && x < xhi && y > ylo && y < yhi; }
};

} // namespace detail

/// Integrates the ray equations with RK4 (step ds in travel time). At the
/// boundary the crossing is located by bisection; on the observed set the
/// ray stops, elsewhere it reflects specularly.
template <class Medium>
RayRecord trace_ray(const RayState &start, const Medium &med, const BoundarySpec &bnd, double t_max,
                    double ds) {
  const Grid2D &g = bnd.grid();
  const detail::Rect box(g);
  detail::require<ContractError>(box.interior(start.x, start.y), "ray must start inside the domain");
  detail::require<ContractError>(std::abs(hamiltonian(start, med)) <= 1e-10,
                                 "ray start is not normalised (c |p| != 1)");
  detail::require<ConfigError>(ds > 0.0 && t_max > 0.0, "ray step and horizon must be positive");

  RayRecord rec;
  rec.x = start.x;
  rec.y = start.y;
  rec.angle = std::atan2(start.py, start.px);
  const double sin_graze = std::sin(grazing_angle_deg * 3.141592653589793 / 180.0);
  const double snap = 1e-12 * std::max(g.lx(), g.ly());
  constexpr int max_events = 100000;
  int events = 0;

  RayState s = start;
  double t = 0.0;
  while (t < t_max) {
    const double h = std::min(ds, t_max - t);
    RayState next = detail::rk4(s, h, med);
    if (box.contains(next.x, next.y)) {
      s = next;
      t += h;
      rec.max_hamiltonian = std::max(rec.max_hamiltonian, std::abs(hamiltonian(s, med)));
      continue;
    }
    double lo = 0.0, hi = 1.0;
    while ((hi - lo) * h > 1e-10 * ds) {
      const double mid = 0.5 * (lo + hi);
      const RayState m = detail::rk4(s, mid * h, med);
      if (box.contains(m.x, m.y))
        lo = mid;
      else
        hi = mid;
    }
    RayState b = detail::rk4(s, hi * h, med);
    const double tb = t + hi * h;
    if (tb > t_max) break;
    b.x = std::clamp(b.x, box.xlo, box.xhi);
    b.y = std::clamp(b.y, box.ylo, box.yhi);

    const double c = med.speed(b.x, b.y);
    const double vx = c * c * b.px, vy = c * c * b.py;
    const double vnorm = std::hypot(vx, vy);
    struct Contact { Face face; double sin_inc; };
    std::vector<Contact> contacts;
    if (b.x <= box.xlo + snap && vx < 0.0) contacts.push_back({Face::left, -vx / vnorm});
    if (b.x >= box.xhi - snap && vx > 0.0) contacts.push_back({Face::right, vx / vnorm});
    if (b.y <= box.ylo + snap && vy < 0.0) contacts.push_back({Face::bottom, -vy / vnorm});
    if (b.y >= box.yhi - snap && vy > 0.0) contacts.push_back({Face::top, vy / vnorm});

    bool observed = false;
    for (const Contact &ct : contacts) {
      const double sp = (ct.face == Face::bottom || ct.face == Face::top) ? (b.x - box.xlo) / g.lx()
                                                                          : (b.y - box.ylo) / g.ly();
      if (ct.sin_inc < sin_graze) rec.grazing = true;
      if (bnd.in_gamma(bnd.nearest_node(ct.face, sp))) {
        observed = true;
        rec.hit_face = ct.face;
      }
    }
    if (observed) {
      rec.reached = true;
      rec.hit_time = tb;
      return rec;
    }
    for (const Contact &ct : contacts) {
      if (ct.face == Face::left || ct.face == Face::right)
        b.px = -b.px;
      else
        b.py = -b.py;
    }
    if (!contacts.empty()) ++rec.reflections;
    if (++events > max_events) break;
    s = b;
    t = tb;
  }
  return rec;
}

/// Direction fan used by estimate_tau.
struct DirectionFan {
  enum class Kind { uniform, horizontal, vertical };
  Kind kind = Kind::uniform;
  /// Half-opening of each sector for the horizontal and vertical kinds.
  double half_angle_deg = 10.0;

  std::vector<double> angles(int n_dirs) const {
    constexpr double pi = 3.141592653589793;
    std::vector<double> out;
    if (kind == Kind::uniform) {
      for (int k = 0; k < n_dirs; ++k) out.push_back(2.0 * pi * (k + 0.5) / n_dirs);
      return out;
    }
    const double base = kind == Kind::horizontal ? 0.0 : 0.5 * pi;
    const double half = half_angle_deg * pi / 180.0;
    const int per = std::max(1, (n_dirs + 1) / 2);
    for (double centre : {base, base + pi})
      for (int k = 0; k < per; ++k)
        out.push_back(per == 1 ? centre : centre - half + 2.0 * half * k / (per - 1));
    return out;
  }
};

/// Rays from an n_points x n_points cell-centred lattice times a direction
/// fan. tau_hat is the largest non-grazing hit time.
template <class Medium>
RayReport estimate_tau(const Medium &med, const BoundarySpec &bnd, int n_points, int n_dirs, double t_max,
                       double ds, const DirectionFan &fan = {}) {
  detail::require<ConfigError>(n_points >= 1 && n_dirs >= 1, "need at least one start point and direction");
  const Grid2D &g = bnd.grid();
  const auto angles = fan.angles(n_dirs);
  const std::size_t na = angles.size();
  RayReport rep;
  rep.rays.resize(static_cast<std::size_t>(n_points) * n_points * na);
  const long total = static_cast<long>(rep.rays.size());
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (long r = 0; r < total; ++r) {
    const std::size_t a = static_cast<std::size_t>(r) % na;
    const long pt = r / static_cast<long>(na);
    const double x = g.x0 + (static_cast<double>(pt % n_points) + 0.5) / n_points * g.lx();
    const double y = g.y0 + (static_cast<double>(pt / n_points) + 0.5) / n_points * g.ly();
    rep.rays[r] = trace_ray(RayState::aimed(x, y, angles[a], med), med, bnd, t_max, ds);
  }
  RaySummary &sum = rep.summary;
  sum.n_rays = rep.rays.size();
  for (const RayRecord &rec : rep.rays) {
    if (rec.grazing) ++sum.grazing_count;
    if (!rec.reached) continue;
    ++sum.n_reached;
    if (!rec.grazing) sum.tau_hat = std::max(sum.tau_hat.value_or(0.0), rec.hit_time);
  }
  sum.fraction_reached = sum.n_rays ? static_cast<double>(sum.n_reached) / sum.n_rays : 0.0;
  return rep;
}

/// Sound speed interpolated from grid samples (Catmull-Rom, C1), for ray
/// tracing through media that exist only as fields.
class SampledSpeed {
public:
  explicit SampledSpeed(ScalarField c) : c_(std::move(c)) {}

  double speed(double x, double y) const { return eval(x, y)[0]; }
  std::array<double, 2> speed_gradient(double x, double y) const {
    const auto e = eval(x, y);
    return {e[1], e[2]};
  }

private:
  static std::array<double, 4> w(double t) {
    const double t2 = t * t, t3 = t2 * t;
    return {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t),
            0.5 * (t3 - t2)};
  }
  static std::array<double, 4> dw(double t) {
    const double t2 = t * t;
    return {0.5 * (-3 * t2 + 4 * t - 1), 0.5 * (9 * t2 - 10 * t), 0.5 * (-9 * t2 + 8 * t + 1),
            0.5 * (3 * t2 - 2 * t)};
  }
  std::array<double, 3> eval(double x, double y) const {
    const Grid2D &g = c_.grid();
    const double fx = std::clamp((x - g.x0) / g.hx, 0.0, g.nx - 1.0);
    const double fy = std::clamp((y - g.y0) / g.hy, 0.0, g.ny - 1.0);
    const int i = std::min(static_cast<int>(fx), g.nx - 2), j = std::min(static_cast<int>(fy), g.ny - 2);
    const auto wx = w(fx - i), wy = w(fy - j), dx = dw(fx - i), dy = dw(fy - j);
    double v = 0.0, gx = 0.0, gy = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int jj = std::clamp(j - 1 + b, 0, g.ny - 1);
      for (int a = 0; a < 4; ++a) {
        const double f = c_(std::clamp(i - 1 + a, 0, g.nx - 1), jj);
        v += wx[a] * wy[b] * f;
        gx += dx[a] * wy[b] * f;
        gy += wx[a] * dy[b] * f;
      }
    }
    return {v, gx / g.hx, gy / g.hy};
  }

  ScalarField c_;
};

} // namespace epat
