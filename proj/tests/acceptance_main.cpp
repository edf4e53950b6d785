// Acceptance suite: runs every toolkit-level criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "quadcurv/quadcurv.hpp"

using namespace quadcurv;
using std::numbers::pi;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& title, const std::function<bool(std::string&)>& fn) {
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::printf("[%s] criterion %2d: %s (%lld ms)%s%s\n", ok ? "PASS" : "FAIL", number,
                title.c_str(), static_cast<long long>(ms), detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!ok) ++g_failures;
}

ModelPoint sphere_pt(Rng& rng, double radius = 1.0) {
    std::array<double, 3> g;
    double n = 0.0;
    do {
        for (auto& x : g) x = rng.normal();
        n = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    } while (n < 1e-12);
    for (auto& x : g) x *= radius / n;
    return SpherePoint{g};
}

std::array<double, 3> hyp_vertex(double r, double theta) {
    return {std::cosh(r), std::sinh(r) * std::cos(theta), std::sinh(r) * std::sin(theta)};
}

// nested golden-section intersection of two geodesics (median equality case)
ModelPoint intersect_geodesics(const ModelSpace& space, const ModelPoint& a0, const ModelPoint& a1,
                               const ModelPoint& b0, const ModelPoint& b1) {
    constexpr double kGolden = 0.6180339887498949;
    auto nearest_on_b = [&](const ModelPoint& pt) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 90; ++i) {
            const double u1 = hi - kGolden * (hi - lo), u2 = lo + kGolden * (hi - lo);
            if (distance(space, pt, geodesic_point(space, b0, b1, u1)) <
                distance(space, pt, geodesic_point(space, b0, b1, u2)))
                hi = u2;
            else
                lo = u1;
        }
        return distance(space, pt, geodesic_point(space, b0, b1, 0.5 * (lo + hi)));
    };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 90; ++i) {
        const double t1 = hi - kGolden * (hi - lo), t2 = lo + kGolden * (hi - lo);
        if (nearest_on_b(geodesic_point(space, a0, a1, t1)) <
            nearest_on_b(geodesic_point(space, a0, a1, t2)))
            hi = t2;
        else
            lo = t1;
    }
    return geodesic_point(space, a0, a1, 0.5 * (lo + hi));
}

bool criterion_counterexample(std::string& detail) {
    for (double eps : {0.01, 0.1}) {
        const auto f = counterexample_f(eps);
        const auto report = check_all_labelings(f, Kappa{0.0});
        const auto& star = report.stat(Condition::Star);
        if (star.verdict != Verdict::Pass || !(star.min_residual > 0.0)) {
            detail = "star did not pass all labelings at eps=" + format_significant(eps);
            return false;
        }
        const auto& angles = report.stat(Condition::OnePlusThree);
        if (angles.verdict != Verdict::Fail || angles.worst_labeling[0] != 0) {
            detail = "angle condition did not fail at apex p, eps=" + format_significant(eps);
            return false;
        }
        const double excess = -angles.min_residual;
        if (!(excess >= 2.0 * std::asin(eps / 2.0) - 1e-9)) {
            detail = "angle excess " + format_significant(excess) + " below 2*asin(eps/2)";
            return false;
        }
        if (embed_any(f).success()) {
            detail = "counterexample unexpectedly embedded, eps=" + format_significant(eps);
            return false;
        }
    }
    return true;
}

bool criterion_euclidean_identity(std::string& detail) {
    Rng rng(2026);
    double worst = 0.0;
    for (std::size_t dim : {2u, 3u}) {
        for (int i = 0; i < 10000; ++i) {
            std::vector<std::vector<double>> pts(4, std::vector<double>(dim));
            for (auto& p : pts)
                for (auto& c : p) c = rng.uniform(-1.0, 1.0);
            std::array<double, 6> d{};
            int w = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < dim; ++k)
                        s += (pts[a][k] - pts[b][k]) * (pts[a][k] - pts[b][k]);
                    d[w++] = std::sqrt(s);
                }
            // order: (01)(02)(03)(12)(13)(23); apex 0
            const LabeledQuadruple q{{d[0], d[1], d[2]}, {d[3], d[5], d[4]}};
            double g2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double g = (pts[1][k] + pts[2][k] + pts[3][k]) / 3.0;
                g2 += (pts[0][k] - g) * (pts[0][k] - g);
            }
            const double scale = q.max_distance();
            const double err = std::abs(star_residual(q).value - 3.0 * g2);
            worst = std::max(worst, err / (scale * scale));
            if (err > 1e-9 * scale * scale) {
                detail = "identity violated by " + format_significant(err);
                return false;
            }
        }
    }
    detail = "worst scaled deviation " + format_significant(worst);
    return true;
}

bool criterion_positivity(std::string& detail) {
    const auto sphere = run_positivity(ModelSpace::sphere(1.0), 100000, 7);
    const auto cone = run_positivity(ModelSpace::cone(1.5 * pi), 100000, 7, 1.0);
    const auto s_star = sphere.find(Condition::Star);
    const auto s_ang = sphere.find(Condition::OnePlusThree);
    const auto s_plus = sphere.find(Condition::StarPlus);
    const auto c_star = cone.find(Condition::Star);
    std::ostringstream os;
    os << "sphere star/angles/plus violations " << s_star->violations << "/" << s_ang->violations
       << "/" << s_plus->violations << ", cone star violations " << c_star->violations
       << ", min residuals " << format_significant(s_star->min_residual) << " / "
       << format_significant(c_star->min_residual);
    detail = os.str();
    return s_star->violations == 0 && s_ang->violations == 0 && s_plus->violations == 0 &&
           c_star->violations == 0 && !sphere.falsifying && !cone.falsifying;
}

bool criterion_hyperbolic_falsification(std::string& detail) {
    const auto h = ModelSpace::hyperbolic(-1.0);
    const double side = 10.0;
    const double r = std::asinh(std::sqrt(2.0 * (std::cosh(side) - 1.0) / 3.0));
    const auto q = quadruple_from_points(
        h, HyperbolicPoint{{1.0, 0.0, 0.0}}, HyperbolicPoint{hyp_vertex(r, 0.0)},
        HyperbolicPoint{hyp_vertex(r, 2.0 * pi / 3.0)}, HyperbolicPoint{hyp_vertex(r, 4.0 * pi / 3.0)});
    const double constructed = star_residual(q).value;
    const auto campaign = run_violation_search(h, 10000, 13, 10.0);
    const auto* star = campaign.find(Condition::Star);
    detail = "constructed residual " + format_significant(constructed) + ", sampled violations " +
             std::to_string(star->violations);
    return constructed < -1.0 && star->violations >= 1;
}

bool criterion_equality_cases(std::string& detail) {
    const auto s1 = ModelSpace::sphere(1.0);
    const double inv = 1.0 / std::sqrt(3.0);
    const auto octant =
        quadruple_from_points(s1, SpherePoint{{inv, inv, inv}}, SpherePoint{{1, 0, 0}},
                              SpherePoint{{0, 1, 0}}, SpherePoint{{0, 0, 1}});
    const double plus = star_plus_residual(octant).value;

    const auto h = ModelSpace::hyperbolic(-1.0);
    const ModelPoint x1 = HyperbolicPoint{hyp_vertex(0.9, 0.2)};
    const ModelPoint x2 = HyperbolicPoint{hyp_vertex(1.3, 2.1)};
    const ModelPoint x3 = HyperbolicPoint{hyp_vertex(0.6, 4.4)};
    const ModelPoint p =
        intersect_geodesics(h, x1, midpoint(h, x2, x3), x2, midpoint(h, x3, x1));
    const double minus = star_minus_residual(quadruple_from_points(h, p, x1, x2, x3)).value;

    detail = "octant plus residual " + format_significant(plus) + ", median minus residual " +
             format_significant(minus);
    return std::abs(plus) <= 1e-12 && std::abs(minus) <= 1e-9;
}

bool criterion_iteration(std::string& detail) {
    Rng rng(99);
    // euclidean traces: alpha identically 2
    double worst_alpha_dev = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = (trial % 2) ? 2 : 3;
        const auto space = ModelSpace::euclidean(dim);
        std::vector<double> p(dim), q(dim), x(dim);
        for (auto& c : p) c = rng.uniform(-2, 2);
        for (auto& c : q) c = rng.uniform(-2, 2);
        for (auto& c : x) c = rng.uniform(-2, 2);
        const ModelPoint pp = EuclideanPoint{p}, qq = EuclideanPoint{q}, xx = EuclideanPoint{x};
        if (distance(space, xx, midpoint(space, pp, qq)) < 0.1) continue;
        const auto trace = run_iteration(space, pp, qq, xx, 12);
        for (const auto& s : trace.steps) worst_alpha_dev = std::max(worst_alpha_dev, std::abs(s.alpha - 2.0));
    }
    if (worst_alpha_dev > 1e-9) {
        detail = "euclidean alpha deviates by " + format_significant(worst_alpha_dev);
        return false;
    }
    // sphere traces: ceiling, recursion slack, and the median bound at n=0
    const auto s1 = ModelSpace::sphere(1.0);
    double worst_slack = 0.0, worst_alpha = 0.0, worst_median = 0.0;
    int traces = 0;
    while (traces < 1000) {
        const ModelPoint p = sphere_pt(rng), q = sphere_pt(rng), x = sphere_pt(rng);
        if (pi - distance(s1, p, q) < 0.1) continue;
        const auto z = midpoint(s1, p, q);
        const double dxz = distance(s1, x, z);
        if (dxz < 0.2 || pi - dxz < 0.1) continue;
        ++traces;
        const auto trace = run_iteration(s1, p, q, x, 12);
        for (const auto& s : trace.steps) worst_alpha = std::max(worst_alpha, s.alpha);
        for (double sl : trace.recursion_slack) worst_slack = std::min(worst_slack, sl);
        const auto [two, three] =
            midpoint_residuals(distance(s1, x, p), distance(s1, x, q), trace.dist_pq, dxz);
        worst_median = std::min(worst_median, two.value);
    }
    std::ostringstream os;
    os << "euclid max|alpha-2| " << format_significant(worst_alpha_dev) << ", sphere max alpha "
       << format_significant(worst_alpha) << ", min slack " << format_significant(worst_slack)
       << ", min median residual " << format_significant(worst_median);
    detail = os.str();
    return worst_alpha <= 3.0 + 1e-6 && worst_slack >= -1e-6 && worst_median >= -1e-6;
}

bool criterion_embedding_roundtrip(std::string& detail) {
    const auto plane = ModelSpace::euclidean(2);
    const auto plane_pts = sample(plane, 404, 4000, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i + 3 < plane_pts.size(); i += 4) {
        std::vector<std::vector<double>> m(4, std::vector<double>(4, 0.0));
        const std::array<const ModelPoint*, 4> q{&plane_pts[i], &plane_pts[i + 1],
                                                 &plane_pts[i + 2], &plane_pts[i + 3]};
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    m[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                        distance(plane, *q[static_cast<std::size_t>(a)],
                                 *q[static_cast<std::size_t>(b)]);
        const auto check = FiniteMetricSpace::check(m);
        if (check) continue;  // coincident sample, skip
        const auto res = embed_any(FiniteMetricSpace::validate(m));
        if (!res.success()) {
            detail = "plane quadruple " + std::to_string(i / 4) + " failed: " +
                     res.certificate.message;
            return false;
        }
        worst = std::max(worst, res.max_distance_error);
    }
    const auto s2 = ModelSpace::sphere(2.0);
    const auto sph_pts = sample(s2, 505, 4000);
    for (std::size_t i = 0; i + 3 < sph_pts.size(); i += 4) {
        std::vector<std::vector<double>> m(4, std::vector<double>(4, 0.0));
        const std::array<const ModelPoint*, 4> q{&sph_pts[i], &sph_pts[i + 1], &sph_pts[i + 2],
                                                 &sph_pts[i + 3]};
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    m[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                        distance(s2, *q[static_cast<std::size_t>(a)],
                                 *q[static_cast<std::size_t>(b)]);
        if (FiniteMetricSpace::check(m)) continue;
        const auto res = embed_any(FiniteMetricSpace::validate(m));
        if (!res.success()) {
            detail = "sphere quadruple " + std::to_string(i / 4) + " failed: " +
                     res.certificate.message;
            return false;
        }
        worst = std::max(worst, res.max_distance_error);
    }
    if (embed_any(counterexample_f(0.1)).success()) {
        detail = "counterexample unexpectedly embedded";
        return false;
    }
    detail = "worst round-trip distance error " + format_significant(worst);
    return worst <= 1e-8;
}

bool criterion_implication(std::string& detail) {
    const auto campaign = run_implication_test(10000, 1);
    const auto* star = campaign.find(Condition::Star);
    std::ostringstream os;
    os << campaign.premise_passing << " premise-passing metrics, " << star->violations
       << " star violations, min residual " << format_significant(star->min_residual);
    detail = os.str();
    return !campaign.falsifying && campaign.premise_passing > 0 && star->violations == 0;
}

bool criterion_small_scale(std::string& detail) {
    const auto s1 = ModelSpace::sphere(1.0);
    const auto pts = sample(s1, 5150, 400);
    int checked = 0;
    double worst_lo = 1e9, worst_hi = 0.0;
    for (std::size_t i = 0; i + 3 < pts.size() && checked < 50; i += 4) {
        const auto q = quadruple_from_points(s1, pts[i], pts[i + 1], pts[i + 2], pts[i + 3]);
        if (star_residual(q).value < 1e-3) continue;
        std::array<double, 3> gap{};
        const std::array<double, 3> ts{0.2, 0.1, 0.05};
        for (std::size_t k = 0; k < 3; ++k) {
            LabeledQuadruple tq = q;
            for (auto& d : tq.apex_to) d *= ts[k];
            for (auto& d : tq.base) d *= ts[k];
            gap[k] = std::abs(star_plus_residual(tq).value - star_residual(tq).value);
        }
        const double r1 = gap[0] / gap[1], r2 = gap[1] / gap[2];
        worst_lo = std::min({worst_lo, r1, r2});
        worst_hi = std::max({worst_hi, r1, r2});
        if (r1 < 12.0 || r1 > 20.0 || r2 < 12.0 || r2 > 20.0) {
            detail = "decay ratios " + format_significant(r1) + ", " + format_significant(r2) +
                     " outside [12,20]";
            return false;
        }
        ++checked;
    }
    detail = std::to_string(checked) + " quadruples, decay ratios within [" +
             format_significant(worst_lo) + ", " + format_significant(worst_hi) + "]";
    return checked >= 20;
}

bool criterion_determinism(std::string& detail) {
    const auto p1 = run_positivity(ModelSpace::sphere(1.0), 1000, 777);
    const auto p2 = run_positivity(ModelSpace::sphere(1.0), 1000, 777);
    const auto v1 = run_violation_search(ModelSpace::hyperbolic(-1.0), 1000, 777, 10.0);
    const auto v2 = run_violation_search(ModelSpace::hyperbolic(-1.0), 1000, 777, 10.0);
    const auto i1 = run_implication_test(1000, 777);
    const auto i2 = run_implication_test(1000, 777);
    const bool ok = io::to_json(p1).dump() == io::to_json(p2).dump() &&
                    io::to_json(v1).dump() == io::to_json(v2).dump() &&
                    io::to_json(i1).dump() == io::to_json(i2).dump() &&
                    io::histogram_csv(p1) == io::histogram_csv(p2);
    detail = ok ? "positivity, violation-search and implication reports identical" : "mismatch";
    return ok;
}

}  // namespace

int main() {
    std::printf("quadcurv acceptance suite\n");

    {
        // criterion 1 carries its own runtime bound
        std::string detail;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criterion_counterexample(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (sec >= 1.0) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("runtime ") +
                      format_significant(sec) + " s exceeds 1 s";
        }
        std::printf("[%s] criterion  1: counterexample pattern at eps 0.01 and 0.1 (%d ms)%s%s\n",
                    ok ? "PASS" : "FAIL", static_cast<int>(sec * 1000.0),
                    detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++g_failures;
    }

    criterion(2, "Euclidean centroid identity over 10^4 quadruples in dims 2 and 3",
              criterion_euclidean_identity);
    criterion(3, "zero violations on 10^5 sphere and 10^5 cone quadruples",
              criterion_positivity);
    criterion(4, "hyperbolic falsification: constructed triangle and sampled violations",
              criterion_hyperbolic_falsification);
    criterion(5, "equality at the model-plane median intersections", criterion_equality_cases);
    criterion(6, "iteration: euclidean alpha = 2, sphere ceiling/recursion/median bound",
              criterion_iteration);
    criterion(7, "embedding round-trip on 10^3 plane and 10^3 sphere quadruples",
              criterion_embedding_roundtrip);
    criterion(8, "model-angle premise implies the squared-distance condition (10^4 metrics)",
              criterion_implication);
    criterion(9, "fourth-order decay of the plus/star gap under scaling",
              criterion_small_scale);
    criterion(10, "bit-identical campaign reports for identical seeds", criterion_determinism);

    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
