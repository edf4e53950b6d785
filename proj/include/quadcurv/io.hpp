#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadcurv/conditions.hpp"
#include "quadcurv/embedding.hpp"
#include "quadcurv/experiments.hpp"
#include "quadcurv/format.hpp"
#include "quadcurv/iteration.hpp"
#include "quadcurv/metric_space.hpp"

namespace quadcurv::io {

using nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// metric file format, version 1:
//   { "format": 1,
//     "labels": ["p", "x", "y", "z"],          // optional
//     "distances": [[0,1],[1,0], ...] }        // square, row-major rows
// ---------------------------------------------------------------------------

inline FiniteMetricSpace metric_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("metric document must be a JSON object");
    if (!doc.contains("format") || !doc["format"].is_number_integer() ||
        doc["format"].get<int>() != 1)
        throw ParseError("metric document must declare \"format\": 1");
    if (!doc.contains("distances") || !doc["distances"].is_array())
        throw ParseError("metric document needs a \"distances\" array of rows");
    std::vector<std::vector<double>> m;
    for (const auto& row : doc["distances"]) {
        if (!row.is_array()) throw ParseError("\"distances\" must contain rows");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) throw ParseError("distances must be numbers");
            r.push_back(v.get<double>());
        }
        m.push_back(std::move(r));
    }
    std::vector<std::string> labels;
    if (doc.contains("labels")) {
        if (!doc["labels"].is_array()) throw ParseError("\"labels\" must be an array of strings");
        for (const auto& l : doc["labels"]) {
            if (!l.is_string()) throw ParseError("\"labels\" must be an array of strings");
            labels.push_back(l.get<std::string>());
        }
    }
    return FiniteMetricSpace::validate(std::move(m), std::move(labels));
}

inline FiniteMetricSpace read_metric_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return metric_from_json(doc);
}

inline json metric_to_json(const FiniteMetricSpace& space) {
    json doc;
    doc["format"] = 1;
    doc["labels"] = space.labels();
    doc["distances"] = space.matrix();
    return doc;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

inline json to_json(const LabeledQuadruple& q) {
    return json{{"apex_to", q.apex_to}, {"base", q.base}};
}

inline json to_json(const ConditionReport& report, const std::vector<std::string>& labels) {
    json out;
    out["kappa"] = report.angle_kappa.value;
    out["tolerance"] = report.tolerance;
    out["all_pass"] = report.all_pass();
    json conds = json::array();
    for (const auto& s : report.conditions) {
        json c;
        c["condition"] = to_string(s.condition);
        c["applicable"] = s.applicable;
        c["verdict"] = to_string(s.verdict);
        c["labelings"] = s.labelings;
        c["domain_failures"] = s.domain_failures;
        if (s.labelings > 0) {
            c["min_residual"] = s.min_residual;
            json w = json::array();
            for (auto idx : s.worst_labeling) w.push_back(labels[idx]);
            c["worst_labeling"] = w;
            c["worst_indices"] = s.worst_labeling;
        }
        conds.push_back(std::move(c));
    }
    out["conditions"] = std::move(conds);
    return out;
}

inline std::string render_text(const ConditionReport& report,
                               const std::vector<std::string>& labels) {
    std::ostringstream os;
    os << "all-labelings check (kappa=" << format_significant(report.angle_kappa.value)
       << ", tol=" << format_significant(report.tolerance) << ")\n";
    for (const auto& s : report.conditions) {
        os << "  " << to_string(s.condition);
        for (std::size_t i = std::string(to_string(s.condition)).size(); i < 15; ++i) os << ' ';
        os << to_string(s.verdict);
        if (s.labelings > 0) {
            os << "  min residual " << format_significant(s.min_residual) << "  at apex "
               << labels[s.worst_labeling[0]] << " | base " << labels[s.worst_labeling[1]] << ","
               << labels[s.worst_labeling[2]] << "," << labels[s.worst_labeling[3]];
        }
        if (s.domain_failures > 0) os << "  (" << s.domain_failures << " labelings out of domain)";
        os << "\n";
    }
    return os.str();
}

inline json to_json(const ModelPoint& pt) {
    if (const auto* e = pt.get_if<EuclideanPoint>())
        return json{{"kind", "euclidean"}, {"coords", e->coords}};
    if (const auto* s = pt.get_if<SpherePoint>())
        return json{{"kind", "sphere"}, {"coords", s->coords}};
    if (const auto* h = pt.get_if<HyperbolicPoint>())
        return json{{"kind", "hyperbolic"}, {"coords", h->coords}};
    if (const auto* c = pt.get_if<ConePoint>())
        return json{{"kind", "cone"}, {"r", c->r}, {"phi", c->phi}};
    const auto& p = *pt.get_if<ProductPoint>();
    json parts = json::array();
    for (const auto& part : p.parts) parts.push_back(to_json(part));
    return json{{"kind", "product"}, {"parts", std::move(parts)}};
}

inline const char* to_string(EmbeddingResult::Certificate::Kind k) {
    using K = EmbeddingResult::Certificate::Kind;
    switch (k) {
        case K::None: return "none";
        case K::NegativeEigenvalue: return "negative_eigenvalue";
        case K::RankExcess: return "rank_excess";
        case K::DistanceExceedsDiameter: return "distance_exceeds_diameter";
        case K::NoAdmissibleRadius: return "no_admissible_radius";
    }
    return "?";
}

inline json to_json(const EmbeddingResult& res, const std::vector<std::string>& labels) {
    json out;
    out["success"] = res.success();
    if (res.success()) {
        out["target"] = res.target == EmbeddingResult::Target::Plane ? "plane" : "sphere";
        if (res.target == EmbeddingResult::Target::Sphere) out["radius"] = res.sphere_radius;
        out["max_distance_error"] = res.max_distance_error;
        json coords = json::object();
        for (std::size_t i = 0; i < res.coordinates.size(); ++i)
            coords[labels[i]] = to_json(res.coordinates[i]);
        out["coordinates"] = std::move(coords);
    } else {
        json cert;
        cert["kind"] = to_string(res.certificate.kind);
        cert["message"] = res.certificate.message;
        if (res.certificate.kind == EmbeddingResult::Certificate::Kind::NegativeEigenvalue ||
            res.certificate.kind == EmbeddingResult::Certificate::Kind::RankExcess)
            cert["eigenvalue"] = res.certificate.eigenvalue;
        if (res.certificate.kind == EmbeddingResult::Certificate::Kind::NoAdmissibleRadius) {
            cert["bracket"] = {res.certificate.bracket_lo, res.certificate.bracket_hi};
            json prof = json::array();
            for (const auto& [r, lam] : res.certificate.eigen_profile)
                prof.push_back({r, lam});
            cert["eigen_profile"] = std::move(prof);
        }
        out["certificate"] = std::move(cert);
    }
    return out;
}

inline std::string render_text(const EmbeddingResult& res, const std::vector<std::string>& labels) {
    std::ostringstream os;
    if (!res.success()) {
        os << "no isometric embedding: " << res.certificate.message << "\n";
        return os.str();
    }
    if (res.target == EmbeddingResult::Target::Plane)
        os << "embeds in the Euclidean plane";
    else
        os << "embeds in the sphere of radius " << format_significant(res.sphere_radius);
    os << " (max distance error " << format_significant(res.max_distance_error) << ")\n";
    for (std::size_t i = 0; i < res.coordinates.size(); ++i) {
        os << "  " << labels[i] << ": (";
        const json c = to_json(res.coordinates[i]);
        const auto& arr = c["coords"];
        for (std::size_t k = 0; k < arr.size(); ++k)
            os << (k ? ", " : "") << format_significant(arr[k].get<double>());
        os << ")\n";
    }
    return os.str();
}

inline json to_json(const IterationTrace& trace) {
    json out;
    out["space"] = trace.space.describe();
    out["dist_pq"] = trace.dist_pq;
    out["dist_xz"] = trace.dist_xz;
    json steps = json::array();
    for (const auto& s : trace.steps)
        steps.push_back({{"n", s.n}, {"dist_to_z", s.dist_to_z}, {"alpha", s.alpha}});
    out["steps"] = std::move(steps);
    out["recursion_slack"] = trace.recursion_slack;
    json audits = json::array();
    for (const auto& a : trace.audits)
        audits.push_back({{"quadruple", to_json(a.quad)}, {"star_residual", a.star_residual}});
    out["audits"] = std::move(audits);
    return out;
}

inline std::string render_text(const IterationTrace& trace) {
    std::ostringstream os;
    os << "iteration on " << trace.space.describe()
       << "  |pq|=" << format_significant(trace.dist_pq)
       << "  |xz|=" << format_significant(trace.dist_xz) << "\n";
    os << "  n    |x_n z|           alpha_n          slack_n\n";
    for (std::size_t n = 0; n < trace.steps.size(); ++n) {
        const auto& s = trace.steps[n];
        os << "  " << s.n;
        for (std::size_t i = std::to_string(s.n).size(); i < 4; ++i) os << ' ';
        std::string d = format_significant(s.dist_to_z);
        os << d;
        for (std::size_t i = d.size(); i < 18; ++i) os << ' ';
        std::string a = format_significant(s.alpha);
        os << a;
        if (n < trace.recursion_slack.size()) {
            for (std::size_t i = a.size(); i < 17; ++i) os << ' ';
            os << format_significant(trace.recursion_slack[n]);
        }
        os << "\n";
    }
    return os.str();
}

inline json to_json(const Campaign& c) {
    json out;
    out["kind"] = c.kind;
    out["space"] = c.space_spec;
    out["seed"] = c.seed;
    out["count"] = c.count;
    out["radius_bound"] = c.radius_bound;
    out["tolerance"] = c.tolerance;
    out["falsifying"] = c.falsifying;
    if (c.kind == "implication") out["premise_passing"] = c.premise_passing;
    json conds = json::array();
    for (const auto& s : c.conditions) {
        json j;
        j["condition"] = to_string(s.condition);
        j["evaluated"] = s.evaluated;
        j["violations"] = s.violations;
        j["domain_skips"] = s.domain_skips;
        if (s.has_worst) {
            j["min_residual"] = s.min_residual;
            j["worst_sample"] = s.worst_sample;
            j["worst_quadruple"] = to_json(s.worst);
        }
        conds.push_back(std::move(j));
    }
    out["conditions"] = std::move(conds);
    return out;
}

inline std::string render_text(const Campaign& c) {
    std::ostringstream os;
    os << c.kind << " campaign on " << c.space_spec << "  count=" << c.count << " seed=" << c.seed
       << " radius_bound=" << format_significant(c.radius_bound)
       << " tol=" << format_significant(c.tolerance) << "\n";
    if (c.kind == "implication")
        os << "  metrics passing the model-angle premise: " << c.premise_passing << "\n";
    for (const auto& s : c.conditions) {
        os << "  " << quadcurv::to_string(s.condition);
        for (std::size_t i = std::string(quadcurv::to_string(s.condition)).size(); i < 15; ++i)
            os << ' ';
        os << "evaluated " << s.evaluated << ", violations " << s.violations;
        if (s.domain_skips) os << ", out-of-domain " << s.domain_skips;
        if (s.has_worst) {
            os << ", min residual " << format_significant(s.min_residual) << " (sample "
               << s.worst_sample << ")";
        }
        os << "\n";
    }
    if (c.falsifying) os << "  FALSIFYING: see worst quadruples in the JSON report\n";
    return os.str();
}

/// Residual histograms as CSV: one row per bin and condition.
inline std::string histogram_csv(const Campaign& c) {
    std::ostringstream os;
    os << "condition,bin_lo,bin_hi,count\n";
    for (const auto& s : c.conditions) {
        const auto& h = s.histogram;
        const double w = (h.hi - h.lo) / static_cast<double>(h.counts.size());
        os << quadcurv::to_string(s.condition) << ",-inf," << format_significant(h.lo) << ","
           << h.underflow << "\n";
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            os << quadcurv::to_string(s.condition) << ","
               << format_significant(h.lo + static_cast<double>(b) * w) << ","
               << format_significant(h.lo + static_cast<double>(b + 1) * w) << "," << h.counts[b]
               << "\n";
        os << quadcurv::to_string(s.condition) << "," << format_significant(h.hi) << ",inf,"
           << h.overflow << "\n";
    }
    return os.str();
}

inline json to_json(const CounterexampleReport& rep) {
    json out = json::array();
    for (const auto& c : rep.cases) {
        json j;
        j["eps"] = c.eps;
        j["in_contract"] = c.in_contract;
        j["star_pass_all"] = c.star_pass_all;
        j["angles_fail_at_apex_p"] = c.angles_fail_at_apex_p;
        j["embedding_failed"] = c.embedding_failed;
        j["angle_excess"] = c.angle_excess;
        j["pattern_holds"] = c.pattern_holds();
        out.push_back(std::move(j));
    }
    return out;
}

inline std::string render_text(const CounterexampleReport& rep) {
    std::ostringstream os;
    for (const auto& c : rep.cases) {
        os << "eps=" << format_significant(c.eps) << (c.in_contract ? "" : " (out of contract)")
           << ": star " << (c.star_pass_all ? "PASS all labelings" : "FAIL")
           << "; model angles " << (c.angles_fail_at_apex_p ? "FAIL at apex p" : "unexpected")
           << " (angle sum exceeds 2*pi by " << format_significant(c.angle_excess) << ")"
           << "; embedding " << (c.embedding_failed ? "none found" : "unexpectedly found")
           << (c.pattern_holds() ? "" : c.in_contract ? "  <-- PATTERN BROKEN" : "  (recorded only)")
           << "\n";
    }
    return os.str();
}

}  // namespace quadcurv::io
