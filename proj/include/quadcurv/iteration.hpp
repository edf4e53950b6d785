#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "quadcurv/conditions.hpp"
#include "quadcurv/model_geometry.hpp"

namespace quadcurv {

struct XEqualsZError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IterationStep {
    std::size_t n;
    ModelPoint point;    // x_n
    double dist_to_z;    // |x_n z|, follows the 3^-n schedule
    double alpha;        // (|x_n p|^2 + |x_n q|^2 - |pq|^2/2) / |x_n z|^2
};

/// The squared-distance-condition instance backing one recursion step:
/// apex x_{n+1}, base {p, q, x_n}.
struct RecursionAudit {
    LabeledQuadruple quad;
    double star_residual;
};

struct IterationTrace {
    ModelSpace space;
    ModelPoint p, q, x, z;  // z = midpoint of [pq]
    double dist_pq = 0.0;
    double dist_xz = 0.0;
    std::vector<IterationStep> steps;      // n = 0 .. n_max
    std::vector<double> recursion_slack;   // alpha_{n+1} - (3*alpha_n - 4), n = 0 .. n_max-1
    std::vector<RecursionAudit> audits;    // one per slack entry
};

namespace detail {

// --- numerically stable alpha numerator ------------------------------------
//
// alpha_n multiplies the tiny |x_n z|^2 back out of
//   N = |x_n p|^2 + |x_n q|^2 - |pq|^2/2,
// whose direct evaluation cancels O(1) squared distances down to O(9^-n).
// At n = 12 that wipes out ten digits, far beyond the slack tolerances, so
// N is evaluated through differences of nearly equal distances taken
// against the stored midpoint z:
//   N = (A^2 - m_p^2) + (B^2 - m_q^2) + C0,  m_p = |zp|, m_q = |zq|,
// where A - m_p comes from an exact difference-vector inner product and C0
// vanishes to second order in the midpoint rounding (included exactly in
// the Euclidean case, dropped otherwise).

inline double dot_n(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double euclidean_alpha_numerator(const std::vector<double>& x, const std::vector<double>& p,
                                        const std::vector<double>& q,
                                        const std::vector<double>& z) {
    const std::size_t n = x.size();
    std::vector<double> w(n), sp(n), sq(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = x[i] - z[i];
        sp[i] = (x[i] - p[i]) + (z[i] - p[i]);
        sq[i] = (x[i] - q[i]) + (z[i] - q[i]);
        h[i] = (z[i] - p[i]) + (z[i] - q[i]);  // 2*(z - true midpoint)
    }
    return dot_n(w, sp) + dot_n(w, sq) + 0.5 * dot_n(h, h);
}

/// <z/|z| - x/|x|, p/|p|> for unit-rounded 3-vectors, with the norm defects
/// folded back in; plain subtraction would leave an O(ulp) bias that the
/// small true value cannot absorb.
inline double unit_cos_difference(const std::array<double, 3>& z, const std::array<double, 3>& x,
                                  const std::array<double, 3>& p) {
    const double gz = unit_norm_defect(z);
    const double gx = unit_norm_defect(x);
    const double gp = unit_norm_defect(p);
    double t = dot3(sub3(z, x), p);
    t += gz * dot3(z, p) - gx * dot3(x, p);
    return t * (1.0 + gp);
}

/// A - m for sphere central angles A = ang(x,p), m = ang(z,p), through
/// cos A - cos m = -2 sin((A+m)/2) sin((A-m)/2).
inline double sphere_angle_difference(const std::array<double, 3>& x,
                                      const std::array<double, 3>& z,
                                      const std::array<double, 3>& p, double angle_xp,
                                      double angle_zp) {
    const double num = unit_cos_difference(z, x, p);
    const double den = 2.0 * std::sin(0.5 * (angle_xp + angle_zp));
    return 2.0 * std::asin(std::clamp(num / den, -1.0, 1.0));
}

inline double sphere_alpha_numerator(const Sphere& sp, const std::array<double, 3>& x,
                                     const std::array<double, 3>& p,
                                     const std::array<double, 3>& q,
                                     const std::array<double, 3>& z) {
    const double inv = 1.0 / sp.radius;
    const auto xu = scale3(x, inv), pu = scale3(p, inv), qu = scale3(q, inv), zu = scale3(z, inv);
    const double A = unit_angle(xu, pu), B = unit_angle(xu, qu);
    const double mp = unit_angle(zu, pu), mq = unit_angle(zu, qu);
    const double dA = sphere_angle_difference(xu, zu, pu, A, mp);
    const double dB = sphere_angle_difference(xu, zu, qu, B, mq);
    return sp.radius * sp.radius * (dA * (A + mp) + dB * (B + mq));
}

inline double hyperboloid_cosh_difference(const std::array<double, 3>& x,
                                          const std::array<double, 3>& z,
                                          const std::array<double, 3>& p) {
    // cosh A - cosh m = -<x,p>_M + <z,p>_M on the unit hyperboloid
    const double gx = hyperboloid_norm_defect(x);
    const double gz = hyperboloid_norm_defect(z);
    const double gp = hyperboloid_norm_defect(p);
    double t = -mdot3(sub3(x, z), p);
    t += gz * mdot3(z, p) - gx * mdot3(x, p);
    return t * (1.0 + gp);
}

inline double hyperbolic_alpha_numerator(const Hyperbolic& h, const std::array<double, 3>& x,
                                         const std::array<double, 3>& p,
                                         const std::array<double, 3>& q,
                                         const std::array<double, 3>& z) {
    const double s = 1.0 / std::sqrt(-h.kappa);
    const double inv = 1.0 / s;
    const auto xu = scale3(x, inv), pu = scale3(p, inv), qu = scale3(q, inv), zu = scale3(z, inv);
    Hyperbolic unit{-1.0};
    const double A = hyperbolic_distance(unit, xu, pu), B = hyperbolic_distance(unit, xu, qu);
    const double mp = hyperbolic_distance(unit, zu, pu), mq = hyperbolic_distance(unit, zu, qu);
    // cosh A - cosh m = 2 sinh((A+m)/2) sinh((A-m)/2)
    const double dA = 2.0 * std::asinh(hyperboloid_cosh_difference(xu, zu, pu) /
                                       (2.0 * std::sinh(0.5 * (A + mp))));
    const double dB = 2.0 * std::asinh(hyperboloid_cosh_difference(xu, zu, qu) /
                                       (2.0 * std::sinh(0.5 * (B + mq))));
    return s * s * (dA * (A + mp) + dB * (B + mq));
}

inline double alpha_numerator(const ModelSpace& space, const ModelPoint& x, const ModelPoint& p,
                              const ModelPoint& q, const ModelPoint& z) {
    if (space.get_if<Euclidean>())
        return euclidean_alpha_numerator(x.get_if<EuclideanPoint>()->coords,
                                         p.get_if<EuclideanPoint>()->coords,
                                         q.get_if<EuclideanPoint>()->coords,
                                         z.get_if<EuclideanPoint>()->coords);
    if (const auto* s = space.get_if<Sphere>())
        return sphere_alpha_numerator(*s, x.get_if<SpherePoint>()->coords,
                                      p.get_if<SpherePoint>()->coords,
                                      q.get_if<SpherePoint>()->coords,
                                      z.get_if<SpherePoint>()->coords);
    const auto* h = space.get_if<Hyperbolic>();
    return hyperbolic_alpha_numerator(*h, x.get_if<HyperbolicPoint>()->coords,
                                      p.get_if<HyperbolicPoint>()->coords,
                                      q.get_if<HyperbolicPoint>()->coords,
                                      z.get_if<HyperbolicPoint>()->coords);
}

}  // namespace detail

/// Builds the midpoint z of [pq] and the sequence x_0 = x, x_{n+1} on
/// [x_n z] with |x_{n+1} z| = |x_n z|/3, recording alpha_n and the
/// recursion slacks alpha_{n+1} - (3*alpha_n - 4). Supported spaces:
/// Euclidean, Sphere (p,q and x,z non-antipodal), Hyperbolic.
inline IterationTrace run_iteration(const ModelSpace& space, const ModelPoint& p,
                                    const ModelPoint& q, const ModelPoint& x,
                                    std::size_t n_max = 12) {
    if (!space.get_if<Euclidean>() && !space.get_if<Sphere>() && !space.get_if<Hyperbolic>())
        throw ModelDomainError("iteration requires a Euclidean, sphere or hyperbolic space");
    ModelPoint z = midpoint(space, p, q);
    const double dxz = distance(space, x, z);
    if (dxz < 1e-8) throw XEqualsZError("x coincides with the midpoint of [pq]");

    IterationTrace trace{space, p, q, x, z};
    trace.dist_pq = distance(space, p, q);
    trace.dist_xz = dxz;

    ModelPoint xn = x;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double d = distance(space, xn, z);
        const double alpha = detail::alpha_numerator(space, xn, p, q, z) / (d * d);
        trace.steps.push_back({n, xn, d, alpha});
        if (n == n_max) break;
        ModelPoint next = geodesic_point(space, xn, z, 2.0 / 3.0);
        trace.audits.push_back(
            {quadruple_from_points(space, next, p, q, xn), 0.0});
        xn = next;
    }
    for (std::size_t n = 0; n + 1 < trace.steps.size(); ++n) {
        trace.recursion_slack.push_back(trace.steps[n + 1].alpha -
                                        (3.0 * trace.steps[n].alpha - 4.0));
        trace.audits[n].star_residual = star_residual(trace.audits[n].quad).value;
    }
    return trace;
}

/// Per-step check alpha_{n+1} >= 3*alpha_n - 4 - tol.
inline std::vector<bool> verify_recursion(const IterationTrace& trace, double tol = 1e-6) {
    if (trace.steps.size() < 2)
        throw std::invalid_argument("trace needs at least two steps");
    std::vector<bool> ok;
    ok.reserve(trace.steps.size() - 1);
    for (std::size_t n = 0; n + 1 < trace.steps.size(); ++n)
        ok.push_back(trace.steps[n + 1].alpha >= 3.0 * trace.steps[n].alpha - 4.0 - tol);
    return ok;
}

}  // namespace quadcurv
