#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "quadcurv/conditions.hpp"
#include "quadcurv/embedding.hpp"
#include "quadcurv/metric_space.hpp"
#include "quadcurv/model_geometry.hpp"
#include "quadcurv/rng.hpp"

namespace quadcurv {

/// Fixed-bin residual histogram (streaming; out-of-range values land in the
/// underflow/overflow counters).
struct Histogram {
    double lo = -1.0, hi = 3.0;
    std::array<std::uint64_t, 64> counts{};
    std::uint64_t underflow = 0, overflow = 0;

    void add(double v) {
        if (v < lo) {
            ++underflow;
            return;
        }
        if (v >= hi) {
            ++overflow;
            return;
        }
        const auto bin = static_cast<std::size_t>((v - lo) / (hi - lo) * counts.size());
        ++counts[std::min(bin, counts.size() - 1)];
    }
};

struct ConditionSummary {
    Condition condition;
    std::size_t evaluated = 0;
    std::size_t domain_skips = 0;
    std::size_t violations = 0;  // labelings with residual < -tol
    double min_residual = std::numeric_limits<double>::infinity();
    LabeledQuadruple worst{};  // kept verbatim so it can be replayed
    std::size_t worst_sample = 0;
    bool has_worst = false;
    Histogram histogram;

    void record(double value, const LabeledQuadruple& quad, std::size_t sample_index,
                double tol) {
        ++evaluated;
        histogram.add(value);
        if (value < -tol) ++violations;
        if (value < min_residual) {
            min_residual = value;
            worst = quad;
            worst_sample = sample_index;
            has_worst = true;
        }
    }
};

/// One deterministic Monte Carlo run: identical (space spec, seed, count)
/// reproduce identical statistics bit for bit.
struct Campaign {
    std::string kind;  // "positivity" | "violation_search" | "implication"
    std::string space_spec;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    double radius_bound = 1.0;
    double tolerance = 1e-9;
    Kappa angle_kappa{0.0};
    std::vector<ConditionSummary> conditions;
    bool falsifying = false;           // a declared-nonnegative assertion failed
    std::size_t premise_passing = 0;   // implication test only

    const ConditionSummary* find(Condition c) const {
        for (const auto& s : conditions)
            if (s.condition == c) return &s;
        return nullptr;
    }
    ConditionSummary* find(Condition c) {
        for (auto& s : conditions)
            if (s.condition == c) return &s;
        return nullptr;
    }
};

namespace detail {

/// The four apex labelings of one sampled quadruple, from its distance
/// matrix (points indexed 0..3, base kept in ascending index order).
inline std::array<LabeledQuadruple, 4> apex_labelings(const std::array<std::array<double, 4>, 4>& d) {
    std::array<LabeledQuadruple, 4> out;
    for (std::size_t a = 0; a < 4; ++a) {
        std::array<std::size_t, 3> b{};
        std::size_t w = 0;
        for (std::size_t r = 0; r < 4; ++r)
            if (r != a) b[w++] = r;
        out[a] = LabeledQuadruple{{d[a][b[0]], d[a][b[1]], d[a][b[2]]},
                                  {d[b[0]][b[1]], d[b[1]][b[2]], d[b[2]][b[0]]}};
    }
    return out;
}

inline std::array<std::array<double, 4>, 4> pairwise_distances(const ModelSpace& space,
                                                               const std::array<ModelPoint, 4>& pts) {
    std::array<std::array<double, 4>, 4> d{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            d[i][j] = d[j][i] = distance(space, pts[i], pts[j]);
    return d;
}

}  // namespace detail

inline const std::vector<Condition>& all_conditions() {
    static const std::vector<Condition> kAll{Condition::Star, Condition::OnePlusThree,
                                             Condition::StarPlus, Condition::StarMinus};
    return kAll;
}

/// Samples `count` quadruples from a nonnegatively curved model space and
/// evaluates the selected conditions on all four apex labelings. Any
/// squared-distance violation marks the campaign FALSIFYING (none is
/// expected; that is the point).
inline Campaign run_positivity(const ModelSpace& space, std::size_t count, std::uint64_t seed,
                               double radius_bound = 1.0, Tolerance tol = {},
                               Kappa angle_kappa = {0.0},
                               const std::vector<Condition>& which = all_conditions()) {
    if (!space.nonnegatively_curved())
        throw std::invalid_argument("positivity campaign requires a nonnegatively curved space");
    Campaign c;
    c.kind = "positivity";
    c.space_spec = space.describe();
    c.seed = seed;
    c.count = count;
    c.radius_bound = radius_bound;
    c.tolerance = tol.eps_pass;
    c.angle_kappa = angle_kappa;
    for (Condition cond : which) c.conditions.push_back(ConditionSummary{cond});
    ConditionSummary* star = c.find(Condition::Star);
    ConditionSummary* angles = c.find(Condition::OnePlusThree);
    ConditionSummary* plus = c.find(Condition::StarPlus);
    ConditionSummary* minus = c.find(Condition::StarMinus);

    // per-sample seed streams keep the statistics independent of
    // evaluation order, so samples could be farmed out in parallel
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, i));
        const std::array<ModelPoint, 4> pts{
            detail::sample_one(space, rng, radius_bound), detail::sample_one(space, rng, radius_bound),
            detail::sample_one(space, rng, radius_bound), detail::sample_one(space, rng, radius_bound)};
        const auto d = detail::pairwise_distances(space, pts);
        for (const auto& quad : detail::apex_labelings(d)) {
            if (star) star->record(star_residual(quad).value, quad, i, tol.eps_pass);
            if (angles) {
                try {
                    angles->record(one_plus_three_residual(quad, angle_kappa).value, quad, i,
                                   tol.eps_pass);
                } catch (const AngleDomainError&) {
                    ++angles->domain_skips;
                }
            }
            if (plus) {
                if (quad.max_distance() <= std::numbers::pi)
                    plus->record(star_plus_residual(quad).value, quad, i, tol.eps_pass);
                else
                    ++plus->domain_skips;
            }
            if (minus) minus->record(star_minus_residual(quad).value, quad, i, tol.eps_pass);
        }
    }
    c.falsifying = star && star->violations > 0;
    return c;
}

/// Samples quadruples from a hyperbolic plane and reports how often and how
/// badly the squared-distance condition fails (violations are the expected
/// outcome at large sampling radius).
inline Campaign run_violation_search(const ModelSpace& space, std::size_t count,
                                     std::uint64_t seed, double radius_bound = 10.0,
                                     Tolerance tol = {}) {
    const auto* h = space.get_if<Hyperbolic>();
    if (!h) throw std::invalid_argument("violation search requires a hyperbolic space");
    Campaign c;
    c.kind = "violation_search";
    c.space_spec = space.describe();
    c.seed = seed;
    c.count = count;
    c.radius_bound = radius_bound;
    c.tolerance = tol.eps_pass;
    c.conditions = {ConditionSummary{Condition::Star}, ConditionSummary{Condition::StarMinus}};
    auto& star = c.conditions[0];
    auto& minus = c.conditions[1];

    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, i));
        const std::array<ModelPoint, 4> pts{
            detail::sample_one(space, rng, radius_bound), detail::sample_one(space, rng, radius_bound),
            detail::sample_one(space, rng, radius_bound), detail::sample_one(space, rng, radius_bound)};
        const auto d = detail::pairwise_distances(space, pts);
        for (const auto& quad : detail::apex_labelings(d)) {
            star.record(star_residual(quad).value, quad, i, tol.eps_pass);
            minus.record(star_minus_residual(quad).value, quad, i, tol.eps_pass);
        }
    }
    return c;
}

/// Rejection-samples a valid 4-point metric: six distances i.i.d. uniform
/// on (0,1], retried until the matrix passes validation.
inline FiniteMetricSpace random_metric_4(Rng& rng) {
    for (;;) {
        const double px = 1.0 - rng.uniform01(), py = 1.0 - rng.uniform01(),
                     pz = 1.0 - rng.uniform01(), xy = 1.0 - rng.uniform01(),
                     yz = 1.0 - rng.uniform01(), zx = 1.0 - rng.uniform01();
        std::vector<std::vector<double>> m{{0.0, px, py, pz},
                                           {px, 0.0, xy, zx},
                                           {py, xy, 0.0, yz},
                                           {pz, zx, yz, 0.0}};
        if (!FiniteMetricSpace::check(m))
            return FiniteMetricSpace::validate(std::move(m), {"p", "x", "y", "z"});
    }
}

/// Generates random 4-point metrics and, among those whose model-angle
/// condition holds for every apex labeling (kappa = 0), asserts the
/// squared-distance condition on every labeling. A violation would falsify
/// the implication and marks the campaign accordingly.
inline Campaign run_implication_test(std::size_t count, std::uint64_t seed, Tolerance tol = {}) {
    Campaign c;
    c.kind = "implication";
    c.space_spec = "random-metric";
    c.seed = seed;
    c.count = count;
    c.tolerance = tol.eps_pass;
    c.conditions = {ConditionSummary{Condition::Star}, ConditionSummary{Condition::OnePlusThree}};
    auto& star = c.conditions[0];
    auto& angles = c.conditions[1];

    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, i));
        const FiniteMetricSpace m = random_metric_4(rng);
        std::array<std::array<double, 4>, 4> d{};
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) d[a][b] = m.distance(a, b);
        const auto labelings = detail::apex_labelings(d);

        bool premise = true;
        for (const auto& quad : labelings) {
            const double r = one_plus_three_residual(quad, Kappa{0.0}).value;
            angles.record(r, quad, i, tol.eps_pass);
            if (r < 0.0) premise = false;
        }
        if (!premise) continue;
        ++c.premise_passing;
        for (const auto& quad : labelings)
            star.record(star_residual(quad).value, quad, i, tol.eps_pass);
    }
    c.falsifying = star.violations > 0;
    return c;
}

/// Expected pattern for one eps of the four-point construction from
/// counterexample_f, checked at kappa = 0.
struct CounterexampleCase {
    double eps = 0.0;
    bool in_contract = false;  // eps within the asserted [min, max] range
    ConditionReport report;
    EmbeddingResult embedding;
    bool star_pass_all = false;
    bool angles_fail_at_apex_p = false;
    bool embedding_failed = false;
    double angle_excess = 0.0;  // angle sum minus 2*pi at the worst labeling

    bool pattern_holds() const {
        return star_pass_all && angles_fail_at_apex_p && embedding_failed;
    }
};

struct CounterexampleReport {
    std::vector<CounterexampleCase> cases;

    /// True when every in-contract eps shows the full pattern.
    bool all_hold() const {
        for (const auto& c : cases)
            if (c.in_contract && !c.pattern_holds()) return false;
        return true;
    }
};

inline CounterexampleReport reproduce_counterexample(const std::vector<double>& eps_list,
                                                     Tolerance tol = {}) {
    CounterexampleReport out;
    for (double eps : eps_list) {
        CounterexampleCase cs;
        cs.eps = eps;
        cs.in_contract =
            eps >= kCounterexampleFMinAssertedEps && eps <= kCounterexampleFMaxEps;
        const FiniteMetricSpace f = counterexample_f(eps);
        cs.report = check_all_labelings(f, Kappa{0.0}, tol);
        cs.embedding = embed_any(f);
        const auto& star = cs.report.stat(Condition::Star);
        const auto& angles = cs.report.stat(Condition::OnePlusThree);
        cs.star_pass_all = star.verdict == Verdict::Pass;
        cs.angles_fail_at_apex_p =
            angles.verdict == Verdict::Fail && angles.worst_labeling[0] == 0;
        cs.embedding_failed = !cs.embedding.success();
        cs.angle_excess = -angles.min_residual;
        out.cases.push_back(std::move(cs));
    }
    return out;
}

}  // namespace quadcurv
