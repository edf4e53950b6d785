#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "quadcurv/format.hpp"
#include "quadcurv/metric_space.hpp"
#include "quadcurv/rng.hpp"

namespace quadcurv {

/// Curvature of the model plane, units 1/length^2.
struct Kappa {
    double value = 0.0;
};

struct DegenerateSideError : std::domain_error {
    using std::domain_error::domain_error;
};
struct NotATriangleError : std::domain_error {
    using std::domain_error::domain_error;
};
struct ModelDomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct MismatchedSpaceError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AntipodalPointsError : std::domain_error {
    using std::domain_error::domain_error;
};
struct NoUniqueMidpointError : std::domain_error {
    using std::domain_error::domain_error;
};

namespace detail {

inline constexpr double kArgClampWindow = 1e-9;

/// acos with the rounding-versus-invalid-input policy: arguments within
/// 1e-9 outside [-1,1] are clamped (accumulated rounding), anything
/// further out is a genuine domain failure.
inline double clamped_acos(double x) {
    if (x > 1.0) {
        if (x > 1.0 + kArgClampWindow) throw NotATriangleError("law-of-cosines argument > 1");
        x = 1.0;
    } else if (x < -1.0) {
        if (x < -1.0 - kArgClampWindow) throw NotATriangleError("law-of-cosines argument < -1");
        x = -1.0;
    }
    return std::acos(x);
}

/// Neumaier-compensated sum of products via fma; returns head and tail.
inline void acc_product(double a, double b, double& sum, double& comp) {
    const double p = a * b;
    const double err = std::fma(a, b, -p);
    const double t = sum + p;
    comp += (std::abs(sum) >= std::abs(p)) ? (sum - t) + p : (p - t) + sum;
    comp += err;
    sum = t;
}

}  // namespace detail

/// Angle at the vertex between sides a and b, opposite side c, of the
/// triangle with these side lengths in the model plane of curvature kappa.
///
///   kappa = 0:  acos((a^2 + b^2 - c^2) / (2ab))
///   kappa > 0:  acos((cos(sc) - cos(sa)cos(sb)) / (sin(sa)sin(sb))),  s = sqrt(kappa)
///   kappa < 0:  acos((cosh(sa)cosh(sb) - cosh(sc)) / (sinh(sa)sinh(sb))),  s = sqrt(-kappa)
///
/// For kappa > 0 the triangle must fit in the model plane: sides at most
/// pi/s and perimeter at most 2*pi/s (enforced with a 1e-9 slack).
inline double comparison_angle(double a, double b, double c, Kappa kappa) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DegenerateSideError("comparison angle needs a > 0 and b > 0");
    if (c < 0.0) throw NotATriangleError("negative side length");
    const double k = kappa.value;
    if (!std::isfinite(k)) throw ModelDomainError("curvature must be finite");
    if (k == 0.0) {
        return detail::clamped_acos((a * a + b * b - c * c) / (2.0 * a * b));
    }
    if (k > 0.0) {
        const double s = std::sqrt(k);
        const double side_max = std::numbers::pi / s + detail::kArgClampWindow;
        if (a > side_max || b > side_max || c > side_max)
            throw ModelDomainError("side exceeds model-plane diameter pi/sqrt(kappa)");
        if (a + b + c > 2.0 * std::numbers::pi / s + detail::kArgClampWindow)
            throw ModelDomainError("perimeter exceeds 2*pi/sqrt(kappa)");
        const double denom = std::sin(s * a) * std::sin(s * b);
        if (denom <= 0.0)
            throw ModelDomainError("side at model-plane diameter, angle undefined");
        return detail::clamped_acos((std::cos(s * c) - std::cos(s * a) * std::cos(s * b)) / denom);
    }
    const double s = std::sqrt(-k);
    const double denom = std::sinh(s * a) * std::sinh(s * b);
    return detail::clamped_acos((std::cosh(s * a) * std::cosh(s * b) - std::cosh(s * c)) / denom);
}

// ---------------------------------------------------------------------------
// Model spaces and points
// ---------------------------------------------------------------------------

class ModelSpace;
class ModelPoint;

struct Euclidean {
    std::size_t dim = 2;
};
struct Sphere {
    double radius = 1.0;
};
struct Hyperbolic {
    double kappa = -1.0;  // < 0; length scale is 1/sqrt(-kappa)
};
struct EuclideanCone {
    double total_angle = 2.0 * std::numbers::pi;
    bool nonnegatively_curved() const { return total_angle <= 2.0 * std::numbers::pi; }
};
struct Product {
    std::vector<ModelSpace> factors;  // exactly two
};

struct EuclideanPoint {
    std::vector<double> coords;
};
struct SpherePoint {
    std::array<double, 3> coords;  // |coords| = R
};
struct HyperbolicPoint {
    std::array<double, 3> coords;  // {x0, x1, x2}, x1^2 + x2^2 - x0^2 = -1/(-kappa), x0 > 0
};
struct ConePoint {
    double r = 0.0;    // >= 0
    double phi = 0.0;  // in [0, total_angle)
};
struct ProductPoint {
    std::vector<ModelPoint> parts;  // exactly two
};

class ModelPoint {
public:
    using Variant =
        std::variant<EuclideanPoint, SpherePoint, HyperbolicPoint, ConePoint, ProductPoint>;

    ModelPoint(EuclideanPoint p) : v_(std::move(p)) {}
    ModelPoint(SpherePoint p) : v_(p) {}
    ModelPoint(HyperbolicPoint p) : v_(p) {}
    ModelPoint(ConePoint p) : v_(p) {}
    ModelPoint(ProductPoint p) : v_(std::move(p)) {}

    const Variant& variant() const { return v_; }
    template <class T>
    const T* get_if() const {
        return std::get_if<T>(&v_);
    }

private:
    Variant v_;
};

class ModelSpace {
public:
    using Variant = std::variant<Euclidean, Sphere, Hyperbolic, EuclideanCone, Product>;

    ModelSpace(Euclidean e) : v_(e) {
        if (e.dim < 1) throw std::invalid_argument("euclidean dimension must be >= 1");
    }
    ModelSpace(Sphere s) : v_(s) {
        if (!(s.radius > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
    }
    ModelSpace(Hyperbolic h) : v_(h) {
        if (!(h.kappa < 0.0)) throw std::invalid_argument("hyperbolic curvature must be < 0");
    }
    ModelSpace(EuclideanCone c) : v_(c) {
        if (!(c.total_angle > 0.0)) throw std::invalid_argument("cone angle must be > 0");
    }
    ModelSpace(Product p) : v_(std::move(p)) {
        if (std::get<Product>(v_).factors.size() != 2)
            throw std::invalid_argument("product space takes exactly two factors");
    }

    static ModelSpace euclidean(std::size_t dim) { return ModelSpace(Euclidean{dim}); }
    static ModelSpace sphere(double radius) { return ModelSpace(Sphere{radius}); }
    static ModelSpace hyperbolic(double kappa) { return ModelSpace(Hyperbolic{kappa}); }
    static ModelSpace cone(double total_angle) { return ModelSpace(EuclideanCone{total_angle}); }
    static ModelSpace product(ModelSpace left, ModelSpace right) {
        return ModelSpace(Product{{std::move(left), std::move(right)}});
    }

    const Variant& variant() const { return v_; }
    template <class T>
    const T* get_if() const {
        return std::get_if<T>(&v_);
    }

    bool nonnegatively_curved() const {
        if (std::holds_alternative<Euclidean>(v_) || std::holds_alternative<Sphere>(v_))
            return true;
        if (const auto* c = std::get_if<EuclideanCone>(&v_)) return c->nonnegatively_curved();
        if (const auto* p = std::get_if<Product>(&v_))
            return p->factors[0].nonnegatively_curved() && p->factors[1].nonnegatively_curved();
        return false;  // Hyperbolic
    }

    std::string describe() const {
        if (const auto* e = std::get_if<Euclidean>(&v_))
            return "euclidean(dim=" + std::to_string(e->dim) + ")";
        if (const auto* s = std::get_if<Sphere>(&v_))
            return "sphere(R=" + format_significant(s->radius) + ")";
        if (const auto* h = std::get_if<Hyperbolic>(&v_))
            return "hyperbolic(kappa=" + format_significant(h->kappa) + ")";
        if (const auto* c = std::get_if<EuclideanCone>(&v_))
            return "cone(theta=" + format_significant(c->total_angle) + ")";
        const auto& p = std::get<Product>(v_);
        return "product(" + p.factors[0].describe() + "," + p.factors[1].describe() + ")";
    }

private:
    Variant v_;
};

namespace detail {

inline double norm3(const std::array<double, 3>& u) {
    return std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
}
inline double dot3(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}
inline std::array<double, 3> sub3(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    return {u[0] - v[0], u[1] - v[1], u[2] - v[2]};
}
inline std::array<double, 3> add3(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    return {u[0] + v[0], u[1] + v[1], u[2] + v[2]};
}
inline std::array<double, 3> scale3(const std::array<double, 3>& u, double t) {
    return {t * u[0], t * u[1], t * u[2]};
}

/// Minkowski inner product, signature (-,+,+) with the time coordinate first.
inline double mdot3(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    return u[1] * v[1] + u[2] * v[2] - u[0] * v[0];
}

/// Central angle between unit vectors; accurate for both nearby and
/// nearly-antipodal pairs (the plain acos of the dot product loses half the
/// digits near either end).
inline double unit_angle(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    return 2.0 * std::atan2(norm3(sub3(u, v)), norm3(add3(u, v)));
}

/// (1/|u| - 1) for u within rounding of the unit sphere, computed through a
/// compensated |u|^2 so the tiny defect survives the cancellation in 1-|u|^2.
inline double unit_norm_defect(const std::array<double, 3>& u) {
    double s = 0.0, c = 0.0;
    for (int i = 0; i < 3; ++i) acc_product(u[i], u[i], s, c);
    return ((1.0 - s) - c) / 2.0;
}

/// Minkowski analogue: (1/|u|_M - 1) for u within rounding of the unit
/// hyperboloid <u,u>_M = -1.
inline double hyperboloid_norm_defect(const std::array<double, 3>& u) {
    double s = 0.0, c = 0.0;
    acc_product(u[1], u[1], s, c);
    acc_product(u[2], u[2], s, c);
    acc_product(u[0], -u[0], s, c);
    return ((-1.0 - s) - c) / 2.0;  // (-<u,u> - 1)/2 ~ 1/sqrt(-<u,u>) - 1
}

inline double wrap_angle(double phi, double period) {
    double w = std::fmod(phi, period);
    if (w < 0.0) w += period;
    return w;
}

struct ConeGap {
    double delta;   // angular gap along the shorter side, in [0, period/2]
    double dir;     // +1 to travel from u by +delta, -1 by -delta
};

inline ConeGap cone_gap(const EuclideanCone& c, double phi_u, double phi_v) {
    // |phi_v - phi_u| is exact for angles in [0, theta), which keeps the
    // gap (and hence the distance) symmetric in its arguments bit for bit
    const double raw = phi_v - phi_u;
    const double araw = std::abs(raw);
    const double other = c.total_angle - araw;
    if (araw <= other) return {araw, raw >= 0.0 ? 1.0 : -1.0};
    return {other, raw >= 0.0 ? -1.0 : 1.0};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// distance
// ---------------------------------------------------------------------------

inline double distance(const ModelSpace& space, const ModelPoint& u, const ModelPoint& v);

namespace detail {

inline double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double sphere_distance(const Sphere& sp, const std::array<double, 3>& u,
                              const std::array<double, 3>& v) {
    const double inv = 1.0 / sp.radius;
    return sp.radius * unit_angle(scale3(u, inv), scale3(v, inv));
}

inline double hyperbolic_distance(const Hyperbolic& h, const std::array<double, 3>& u,
                                  const std::array<double, 3>& v) {
    // chordal form: <u-v,u-v>_M = 4 s^2 sinh^2(d/2s); immune to the
    // cancellation that the acosh of the Minkowski product suffers for
    // nearby points far from the basepoint
    const double s = 1.0 / std::sqrt(-h.kappa);
    const auto w = sub3(u, v);
    const double q = std::max(0.0, mdot3(w, w));
    return 2.0 * s * std::asinh(std::sqrt(q) / (2.0 * s));
}

inline double cone_distance(const EuclideanCone& c, const ConePoint& u, const ConePoint& v) {
    if (u.r == 0.0 || v.r == 0.0) return u.r + v.r;
    const double delta = cone_gap(c, u.phi, v.phi).delta;
    if (delta >= std::numbers::pi) return u.r + v.r;
    // sqrt(ru^2 + rv^2 - 2 ru rv cos(delta)), evaluated stably
    return std::hypot(u.r - v.r, 2.0 * std::sqrt(u.r * v.r) * std::sin(delta / 2.0));
}

}  // namespace detail

inline double distance(const ModelSpace& space, const ModelPoint& u, const ModelPoint& v) {
    if (const auto* e = space.get_if<Euclidean>()) {
        const auto* a = u.get_if<EuclideanPoint>();
        const auto* b = v.get_if<EuclideanPoint>();
        if (!a || !b || a->coords.size() != e->dim || b->coords.size() != e->dim)
            throw MismatchedSpaceError("point does not belong to " + space.describe());
        return detail::euclidean_distance(a->coords, b->coords);
    }
    if (const auto* s = space.get_if<Sphere>()) {
        const auto* a = u.get_if<SpherePoint>();
        const auto* b = v.get_if<SpherePoint>();
        if (!a || !b) throw MismatchedSpaceError("point does not belong to " + space.describe());
        return detail::sphere_distance(*s, a->coords, b->coords);
    }
    if (const auto* h = space.get_if<Hyperbolic>()) {
        const auto* a = u.get_if<HyperbolicPoint>();
        const auto* b = v.get_if<HyperbolicPoint>();
        if (!a || !b) throw MismatchedSpaceError("point does not belong to " + space.describe());
        return detail::hyperbolic_distance(*h, a->coords, b->coords);
    }
    if (const auto* c = space.get_if<EuclideanCone>()) {
        const auto* a = u.get_if<ConePoint>();
        const auto* b = v.get_if<ConePoint>();
        if (!a || !b) throw MismatchedSpaceError("point does not belong to " + space.describe());
        return detail::cone_distance(*c, *a, *b);
    }
    const auto& p = std::get<Product>(space.variant());
    const auto* a = u.get_if<ProductPoint>();
    const auto* b = v.get_if<ProductPoint>();
    if (!a || !b || a->parts.size() != 2 || b->parts.size() != 2)
        throw MismatchedSpaceError("point does not belong to " + space.describe());
    return std::hypot(distance(p.factors[0], a->parts[0], b->parts[0]),
                      distance(p.factors[1], a->parts[1], b->parts[1]));
}

// ---------------------------------------------------------------------------
// geodesic interpolation and midpoints
// ---------------------------------------------------------------------------

/// Point at parameter t of the constant-speed geodesic from u (t=0) to
/// v (t=1). Closed form per space; this is what keeps the iteration
/// module's 3^-n distance schedule exact.
inline ModelPoint geodesic_point(const ModelSpace& space, const ModelPoint& u, const ModelPoint& v,
                                 double t);

namespace detail {

inline std::array<double, 3> sphere_geodesic(const Sphere& sp, const std::array<double, 3>& u,
                                             const std::array<double, 3>& v, double t) {
    const double inv = 1.0 / sp.radius;
    const auto a = scale3(u, inv);
    const auto b = scale3(v, inv);
    const double omega = unit_angle(a, b);
    if (std::numbers::pi - omega < 1e-8)
        throw AntipodalPointsError("antipodal points have no unique geodesic");
    std::array<double, 3> w;
    if (omega < 1e-12) {
        w = add3(scale3(a, 1.0 - t), scale3(b, t));
    } else {
        const double s = std::sin(omega);
        w = add3(scale3(a, std::sin((1.0 - t) * omega) / s), scale3(b, std::sin(t * omega) / s));
    }
    const double n = norm3(w);
    if (n <= 0.0) throw AntipodalPointsError("degenerate interpolation");
    return scale3(w, sp.radius / n);
}

inline std::array<double, 3> hyperbolic_geodesic(const Hyperbolic& h,
                                                 const std::array<double, 3>& u,
                                                 const std::array<double, 3>& v, double t) {
    const double s = 1.0 / std::sqrt(-h.kappa);
    const double delta = hyperbolic_distance(h, u, v) / s;  // rapidity
    std::array<double, 3> w;
    if (delta < 1e-12) {
        w = add3(scale3(u, 1.0 - t), scale3(v, t));
    } else {
        const double sh = std::sinh(delta);
        w = add3(scale3(u, std::sinh((1.0 - t) * delta) / sh),
                 scale3(v, std::sinh(t * delta) / sh));
    }
    const double nn = -mdot3(w, w);
    if (nn <= 0.0) throw ModelDomainError("interpolation left the hyperboloid");
    return scale3(w, s / std::sqrt(nn));
}

inline ConePoint cone_geodesic(const EuclideanCone& c, const ConePoint& u, const ConePoint& v,
                               double t) {
    if (u.r == 0.0) return ConePoint{t * v.r, v.phi};
    if (v.r == 0.0) return ConePoint{(1.0 - t) * u.r, u.phi};
    const auto gap = cone_gap(c, u.phi, v.phi);
    const bool flat = c.total_angle == 2.0 * std::numbers::pi;
    if (gap.delta > std::numbers::pi || (gap.delta == std::numbers::pi && !flat))
        throw NoUniqueMidpointError("geodesic through the cone apex is not supported");
    // unroll onto the plane, interpolate, fold back
    const double px = u.r, py = 0.0;
    const double qx = v.r * std::cos(gap.delta), qy = v.r * std::sin(gap.delta);
    const double wx = (1.0 - t) * px + t * qx;
    const double wy = (1.0 - t) * py + t * qy;
    const double r = std::hypot(wx, wy);
    if (r == 0.0) return ConePoint{0.0, 0.0};
    const double psi = std::atan2(wy, wx);
    return ConePoint{r, wrap_angle(u.phi + gap.dir * psi, c.total_angle)};
}

}  // namespace detail

inline ModelPoint geodesic_point(const ModelSpace& space, const ModelPoint& u, const ModelPoint& v,
                                 double t) {
    if (const auto* e = space.get_if<Euclidean>()) {
        const auto* a = u.get_if<EuclideanPoint>();
        const auto* b = v.get_if<EuclideanPoint>();
        if (!a || !b || a->coords.size() != e->dim || b->coords.size() != e->dim)
            throw MismatchedSpaceError("point does not belong to " + space.describe());
        std::vector<double> w(e->dim);
        for (std::size_t i = 0; i < e->dim; ++i)
            w[i] = (1.0 - t) * a->coords[i] + t * b->coords[i];
        return EuclideanPoint{std::move(w)};
    }
    if (const auto* s = space.get_if<Sphere>()) {
        const auto* a = u.get_if<SpherePoint>();
        const auto* b = v.get_if<SpherePoint>();
        if (!a || !b) throw MismatchedSpaceError("point does not belong to " + space.describe());
        return SpherePoint{detail::sphere_geodesic(*s, a->coords, b->coords, t)};
    }
    if (const auto* h = space.get_if<Hyperbolic>()) {
        const auto* a = u.get_if<HyperbolicPoint>();
        const auto* b = v.get_if<HyperbolicPoint>();
        if (!a || !b) throw MismatchedSpaceError("point does not belong to " + space.describe());
        return HyperbolicPoint{detail::hyperbolic_geodesic(*h, a->coords, b->coords, t)};
    }
    if (const auto* c = space.get_if<EuclideanCone>()) {
        const auto* a = u.get_if<ConePoint>();
        const auto* b = v.get_if<ConePoint>();
        if (!a || !b) throw MismatchedSpaceError("point does not belong to " + space.describe());
        return detail::cone_geodesic(*c, *a, *b, t);
    }
    const auto& p = std::get<Product>(space.variant());
    const auto* a = u.get_if<ProductPoint>();
    const auto* b = v.get_if<ProductPoint>();
    if (!a || !b || a->parts.size() != 2 || b->parts.size() != 2)
        throw MismatchedSpaceError("point does not belong to " + space.describe());
    return ProductPoint{{geodesic_point(p.factors[0], a->parts[0], b->parts[0], t),
                         geodesic_point(p.factors[1], a->parts[1], b->parts[1], t)}};
}

/// Midpoint of the geodesic [uv]: distance(u,m) = distance(m,v) = d(u,v)/2.
inline ModelPoint midpoint(const ModelSpace& space, const ModelPoint& u, const ModelPoint& v) {
    return geodesic_point(space, u, v, 0.5);
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

/// Draws `count` points. Sphere sampling is uniform (normalized Gaussian
/// triples scaled by R); Euclidean, hyperbolic and cone sampling use a
/// uniform direction with the radius from the basepoint drawn uniformly in
/// [0, radius_bound]. Deterministic for a fixed seed.
inline std::vector<ModelPoint> sample(const ModelSpace& space, std::uint64_t seed,
                                      std::size_t count, double radius_bound = 1.0);

namespace detail {

inline ModelPoint sample_one(const ModelSpace& space, Rng& rng, double radius_bound) {
    if (const auto* e = space.get_if<Euclidean>()) {
        std::vector<double> dir(e->dim);
        double n = 0.0;
        do {
            n = 0.0;
            for (auto& x : dir) {
                x = rng.normal();
                n += x * x;
            }
            n = std::sqrt(n);
        } while (n < 1e-12);
        const double r = rng.uniform(0.0, radius_bound);
        for (auto& x : dir) x *= r / n;
        return EuclideanPoint{std::move(dir)};
    }
    if (const auto* s = space.get_if<Sphere>()) {
        std::array<double, 3> g;
        double n = 0.0;
        do {
            for (auto& x : g) x = rng.normal();
            n = norm3(g);
        } while (n < 1e-12);
        return SpherePoint{scale3(g, s->radius / n)};
    }
    if (const auto* h = space.get_if<Hyperbolic>()) {
        const double s = 1.0 / std::sqrt(-h->kappa);
        const double r = rng.uniform(0.0, radius_bound);
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double rs = r / s;
        return HyperbolicPoint{
            {s * std::cosh(rs), s * std::sinh(rs) * std::cos(phi), s * std::sinh(rs) * std::sin(phi)}};
    }
    if (const auto* c = space.get_if<EuclideanCone>()) {
        const double r = rng.uniform(0.0, radius_bound);
        const double phi = rng.uniform(0.0, c->total_angle);
        return ConePoint{r, phi};
    }
    const auto& p = std::get<Product>(space.variant());
    ModelPoint left = sample_one(p.factors[0], rng, radius_bound);
    ModelPoint right = sample_one(p.factors[1], rng, radius_bound);
    return ProductPoint{{std::move(left), std::move(right)}};
}

}  // namespace detail

inline std::vector<ModelPoint> sample(const ModelSpace& space, std::uint64_t seed,
                                      std::size_t count, double radius_bound) {
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    if (!(radius_bound > 0.0)) throw std::invalid_argument("radius bound must be > 0");
    Rng rng(seed);
    std::vector<ModelPoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(detail::sample_one(space, rng, radius_bound));
    return out;
}

/// The six pairwise distances of (p,x,y,z) arranged as a LabeledQuadruple.
inline LabeledQuadruple quadruple_from_points(const ModelSpace& space, const ModelPoint& p,
                                              const ModelPoint& x, const ModelPoint& y,
                                              const ModelPoint& z) {
    return LabeledQuadruple{
        {distance(space, p, x), distance(space, p, y), distance(space, p, z)},
        {distance(space, x, y), distance(space, y, z), distance(space, z, x)}};
}

/// How far a point sits from its space's defining surface (relative units);
/// every operation keeps this below 1e-12.
inline double constraint_defect(const ModelSpace& space, const ModelPoint& pt) {
    if (const auto* e = space.get_if<Euclidean>()) {
        const auto* a = pt.get_if<EuclideanPoint>();
        if (!a || a->coords.size() != e->dim)
            throw MismatchedSpaceError("point does not belong to " + space.describe());
        return 0.0;
    }
    if (const auto* s = space.get_if<Sphere>()) {
        const auto* a = pt.get_if<SpherePoint>();
        if (!a) throw MismatchedSpaceError("point does not belong to " + space.describe());
        return std::abs(detail::norm3(a->coords) / s->radius - 1.0);
    }
    if (const auto* h = space.get_if<Hyperbolic>()) {
        const auto* a = pt.get_if<HyperbolicPoint>();
        if (!a) throw MismatchedSpaceError("point does not belong to " + space.describe());
        const double s2 = -1.0 / h->kappa;
        if (a->coords[0] <= 0.0) return std::numeric_limits<double>::infinity();
        // the constraint's conditioning grows with the coordinate magnitude
        // (storing a point at rapidity rho already perturbs <u,u> by
        // ~cosh(2 rho) ulp), so the defect is taken relative to |u|^2 and
        // measured with a compensated product sum
        double s = 0.0, c = 0.0;
        detail::acc_product(a->coords[1], a->coords[1], s, c);
        detail::acc_product(a->coords[2], a->coords[2], s, c);
        detail::acc_product(a->coords[0], -a->coords[0], s, c);
        const double mag = a->coords[0] * a->coords[0] + a->coords[1] * a->coords[1] +
                           a->coords[2] * a->coords[2];
        return std::abs((s + c) + s2) / std::max(s2, mag);
    }
    if (const auto* c = space.get_if<EuclideanCone>()) {
        const auto* a = pt.get_if<ConePoint>();
        if (!a) throw MismatchedSpaceError("point does not belong to " + space.describe());
        double defect = 0.0;
        if (a->r < 0.0) defect = -a->r;
        if (a->phi < 0.0 || a->phi >= c->total_angle) defect = std::max(defect, 1.0);
        return defect;
    }
    const auto& p = std::get<Product>(space.variant());
    const auto* a = pt.get_if<ProductPoint>();
    if (!a || a->parts.size() != 2)
        throw MismatchedSpaceError("point does not belong to " + space.describe());
    return std::max(constraint_defect(p.factors[0], a->parts[0]),
                    constraint_defect(p.factors[1], a->parts[1]));
}

}  // namespace quadcurv
