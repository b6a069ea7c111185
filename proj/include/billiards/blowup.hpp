#ifndef BILLIARDS_BLOWUP_HPP
#define BILLIARDS_BLOWUP_HPP

#include <numeric>

#include "phase.hpp"
#include "sampling.hpp"

namespace billiards {

enum class ScratchKind { Infinity, IsotropicPlus, IsotropicMinus };

inline const char* to_string(ScratchKind k)
{
    switch (k) {
    case ScratchKind::Infinity: return "infinity";
    case ScratchKind::IsotropicPlus: return "isotropic_plus";
    case ScratchKind::IsotropicMinus: return "isotropic_minus";
    }
    return "?";
}

struct ScratchPoint {
    ScratchKind kind = ScratchKind::Infinity;
    PhasePoint phase;
    bool basic = true;
    Pair t;  // tangent direction at c

    // infinity kind: kappa(x) = (t1 x0 - t0 x1 - k0) / |t|, zero on T_c
    cplx k0 = 0;
    double tnorm = 1;

    int sign() const { return kind == ScratchKind::IsotropicMinus ? -1 : 1; }
};

inline cplx kappa(const ScratchPoint& s, const Pair& x)
{
    return (s.t[1] * x[0] - s.t[0] * x[1] - s.k0) / s.tnorm;
}

struct ExceptionalParam {
    ScratchPoint scratch;
    cplx value = 0;
    bool at_infinity_line = false;  // the second boundary point of E for the infinity kind
};

namespace detail {

inline ScratchPoint make_infinity_scratch(const PlaneCurve& C, const ProjPoint& c, int branch)
{
    ScratchPoint s;
    s.kind = ScratchKind::Infinity;
    auto td = tangent_at(C, c);
    s.t = td.t;
    s.phase = {c, direction_from_slope(td.t, branch)};
    s.basic = !s.phase.q.is_isotropic();
    Vec3 g = C.gradient(c.x);
    s.tnorm = std::hypot(std::abs(s.t[0]), std::abs(s.t[1]));
    // (g0, g1) = nu (-t1, t0)
    cplx nu = (g[1] * std::conj(s.t[0]) - g[0] * std::conj(s.t[1])) / (s.tnorm * s.tnorm);
    s.k0 = g[2] / nu;
    return s;
}

} // namespace detail

inline std::vector<ScratchPoint> enumerate_scratch_points(const PlaneCurve& C)
{
    auto rep = genericity_report(C);
    if (!rep.all())
        throw Error(ErrorKind::GenericityFailure,
                    "curve fails genericity" + (rep.diagnostics.empty() ? std::string() : ": " + rep.diagnostics[0]));
    std::vector<ScratchPoint> out;
    for (auto& pm : points_at_infinity(C))
        for (int b : {0, 1}) out.push_back(detail::make_infinity_scratch(C, pm.point, b));
    for (int sgn : {1, -1})
        for (auto& pm : isotropic_tangency_points(C, sgn)) {
            ScratchPoint s;
            s.kind = sgn > 0 ? ScratchKind::IsotropicPlus : ScratchKind::IsotropicMinus;
            s.t = {1.0, cplx(0, sgn)};
            s.phase = {pm.point, DirectionPoint(Vec3{1.0, cplx(0, sgn), 0.0}, false)};
            s.basic = pm.multiplicity == 1;
            out.push_back(s);
        }
    return out;
}

// ---------------------------------------------------------------- chart limit maps

inline BranchSet secant_at_infinity_limit(const PlaneCurve& C, const ExceptionalParam& e)
{
    const auto& s = e.scratch;
    if (s.kind != ScratchKind::Infinity) throw Error(ErrorKind::InvalidArgument, "need an infinity scratch point");
    if (!s.basic) throw Error(ErrorKind::InvalidArgument, "scratch point is not basic");
    if (e.at_infinity_line || !std::isfinite(std::abs(e.value)))
        throw Error(ErrorKind::BoundaryPoint, "line at infinity is a boundary point of E");
    if (std::abs(e.value) < 1e-12) throw Error(ErrorKind::BoundaryPoint, "tangent line T_c is a boundary point of E");

    // a . x = v with a = (t1, -t0)
    const Pair a{s.t[1], -s.t[0]};
    cplx v = s.k0 + e.value * s.tnorm;
    double an = std::norm(a[0]) + std::norm(a[1]);
    Vec3 base{v * std::conj(a[0]) / an, v * std::conj(a[1]) / an, 1.0};
    auto raw = C.form().restrict_to_line(base, {s.t[0], s.t[1], 0.0});
    double m = 0;
    for (auto& z : raw) m = std::max(m, std::abs(z));
    if (std::abs(raw.back()) > 1e-8 * m) throw Error(ErrorKind::InvalidArgument, "tangent direction is not an infinity point");
    raw.pop_back();  // the root at infinity is c itself

    BranchSet out;
    out.source = s.phase;
    out.op = OpTag::Secant;
    for (auto& r : find_roots(ComplexPoly(raw))) {
        Vec3 p{base[0] + r.value * s.t[0], base[1] + r.value * s.t[1], 1.0};
        out.images.push_back({{ProjPoint(p), s.phase.q}, r.multiplicity});
    }
    detail::sort_images(out.images);
    return out;
}

inline ExceptionalParam reflect_at_infinity_limit(const PlaneCurve&, const ExceptionalParam& e)
{
    if (e.scratch.kind != ScratchKind::Infinity) throw Error(ErrorKind::InvalidArgument, "need an infinity scratch point");
    ExceptionalParam r = e;
    r.value = -e.value;
    return r;
}

inline std::pair<ExceptionalParam, BranchSet> secant_at_isotropic_limit(const PlaneCurve& C, const ExceptionalParam& e)
{
    const auto& s = e.scratch;
    if (s.kind == ScratchKind::Infinity) throw Error(ErrorKind::InvalidArgument, "need an isotropic scratch point");
    if (!s.basic) throw Error(ErrorKind::InvalidArgument, "scratch point is not basic");
    ExceptionalParam img = e;
    img.value = -e.value;

    BranchSet stat;
    stat.source = s.phase;
    stat.op = OpTag::Secant;
    if (C.degree() > 2) {
        auto raw = C.form().restrict_to_line(s.phase.c.x, {s.t[0], s.t[1], 0.0});
        auto rest = deflate_root(ComplexPoly(raw), 0.0, 2);
        if (rest.degree() >= 1)
            for (auto& r : find_roots(rest)) {
                const auto& c = s.phase.c;
                Vec3 p{c[0] + r.value * s.t[0], c[1] + r.value * s.t[1], c[2]};
                stat.images.push_back({{ProjPoint(p), s.phase.q}, r.multiplicity});
            }
        detail::sort_images(stat.images);
    }
    return {img, stat};
}

// ---------------------------------------------------------------- extrapolation

inline std::vector<double> default_eps(int n = 13)
{
    std::vector<double> e;
    for (int k = 0; k < n; ++k) e.push_back(1e-2 * std::ldexp(1.0, -k));
    return e;
}

struct Extrapolation {
    std::vector<cplx> limit;
    std::vector<double> diffs;  // successive differences of the extrapolated sequence
    bool cauchy = false;
    bool shrinking = false;
};

// below this the diffs are roundoff amplified by the 1/eps conditioning
constexpr double kNoiseFloor = 1e-8;

// one-step Richardson for first-order error at ratio 1/2
inline Extrapolation richardson(const std::vector<std::vector<cplx>>& L, double tol = 1e-6)
{
    if (L.size() < 3) throw Error(ErrorKind::InvalidArgument, "need at least three epsilon values");
    std::vector<std::vector<cplx>> R;
    for (std::size_t k = 0; k + 1 < L.size(); ++k) {
        std::vector<cplx> r(L[k].size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = 2.0 * L[k + 1][i] - L[k][i];
        R.push_back(r);
    }
    Extrapolation ex;
    ex.limit = R.back();
    for (std::size_t k = 0; k + 1 < R.size(); ++k) {
        double m = 0;
        for (std::size_t i = 0; i < R[k].size(); ++i) m = std::max(m, std::abs(R[k + 1][i] - R[k][i]));
        ex.diffs.push_back(m);
    }
    ex.cauchy = ex.diffs.back() < tol;
    ex.shrinking = true;
    for (std::size_t k = 0; k + 1 < ex.diffs.size(); ++k)
        if (ex.diffs[k + 1] > ex.diffs[k] / 2 && ex.diffs[k + 1] > kNoiseFloor) ex.shrinking = false;
    return ex;
}

namespace detail {

inline std::vector<cplx> flatten(const PhasePoint& x, int pc, int pq)
{
    return {x.c[0] / x.c[pc], x.c[1] / x.c[pc], x.c[2] / x.c[pc],
            x.q[0] / x.q[pq], x.q[1] / x.q[pq], x.q[2] / x.q[pq]};
}

inline PhasePoint unflatten(const std::vector<cplx>& v)
{
    return {ProjPoint(v[0], v[1], v[2]), DirectionPoint(Vec3{v[3], v[4], v[5]}, false)};
}

inline Extrapolation extrapolate_phase(const std::vector<PhasePoint>& xs, double tol = 1e-6)
{
    int pc = ProjPoint::pivot(xs.back().c.x), pq = ProjPoint::pivot(xs.back().q.q);
    std::vector<std::vector<cplx>> L;
    for (auto& x : xs) L.push_back(flatten(x, pc, pq));
    return richardson(L, tol);
}

inline DirectionPoint rotate(const DirectionPoint& q, double eps)
{
    double c = std::cos(eps), s = std::sin(eps);
    return DirectionPoint(Vec3{c * q[0] - s * q[1], s * q[0] + c * q[1], q[2]}, false);
}

// point of C with the given x0, Newton in x1 from a nearby guess
inline ProjPoint curve_point_at_x0(const PlaneCurve& C, cplx x0, cplx x1)
{
    for (int it = 0; it < 50; ++it) {
        Vec3 X{x0, x1, 1.0};
        cplx f = C.form()(X), fx = C.partial(1)(X);
        cplx dx = f / fx;
        x1 -= dx;
        if (std::abs(dx) < 1e-16 * (1 + std::abs(x1))) break;
    }
    return ProjPoint::affine(x0, x1);
}

} // namespace detail

struct IsotropicLimit {
    PhasePoint point;
    Extrapolation ex;
};

inline IsotropicLimit reflect_at_isotropic_limit_detailed(const PlaneCurve& C, const ExceptionalParam& e,
                                                          const std::vector<double>& eps = default_eps())
{
    const auto& s = e.scratch;
    if (s.kind == ScratchKind::Infinity) throw Error(ErrorKind::InvalidArgument, "need an isotropic scratch point");
    if (!s.basic) throw Error(ErrorKind::InvalidArgument, "scratch point is not basic");
    auto c = s.phase.c.affine_coords();
    const cplx I1(0, s.sign());
    std::vector<PhasePoint> seq;
    for (double ep : eps) {
        // x0 - c0 = value * (Q2 / Q0)
        ProjPoint ce = detail::curve_point_at_x0(C, c[0] + e.value * ep, c[1]);
        DirectionPoint qe(Vec3{1.0, I1 * std::sqrt(1 - ep * ep), ep}, false);
        seq.push_back(reflect(C, {ce, qe}).images[0].x);
    }
    auto ex = detail::extrapolate_phase(seq);
    if (!ex.cauchy)
        throw Error(ErrorKind::NonConvergence, "isotropic limit not Cauchy: last difference " + std::to_string(ex.diffs.back()));
    auto p = detail::unflatten(ex.limit);
    return {{s.phase.c, p.q}, ex};
}

inline PhasePoint reflect_at_isotropic_limit(const PlaneCurve& C, const ExceptionalParam& e,
                                             const std::vector<double>& eps = default_eps())
{
    return reflect_at_isotropic_limit_detailed(C, e, eps).point;
}

// ---------------------------------------------------------------- confinement experiments

struct ConfinementReport {
    ScratchPoint scratch;
    std::vector<PhasePoint> samples;
    std::vector<double> eps;
    // per sample: extrapolated limits (d - 1 of them for the infinity kind)
    std::vector<std::vector<PhasePoint>> limits;
    std::vector<std::vector<PhasePoint>> predicted;
    std::vector<std::vector<double>> richardson_diffs;
    double max_prediction_error = 0;
    double min_pairwise_limit_distance = 0;
    bool cauchy = true;
    bool shrinking = true;
};

namespace detail {

inline std::size_t nearest_image(const BranchSet& b, const ProjPoint& target)
{
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t i = 0; i < b.images.size(); ++i) {
        double dd = proj_distance(b.images[i].x.c, target);
        if (dd < bd - 1e-12) { bd = dd; best = i; }
    }
    return best;
}

// smallest max-distance matching between two small sets
inline double set_distance(const std::vector<PhasePoint>& a, const std::vector<PhasePoint>& b)
{
    if (a.size() != b.size()) return 1e300;
    std::vector<int> p(b.size());
    std::iota(p.begin(), p.end(), 0);
    double best = 1e300;
    do {
        double m = 0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, phase_distance(a[i], b[p[i]]));
        best = std::min(best, m);
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

inline void fold(ConfinementReport& rep, const Extrapolation& ex)
{
    rep.richardson_diffs.push_back(ex.diffs);
    rep.cauchy = rep.cauchy && ex.cauchy;
    rep.shrinking = rep.shrinking && ex.shrinking;
}

} // namespace detail

inline ConfinementReport confinement_experiment_infinity(const PlaneCurve& C, const ScratchPoint& sp,
                                                         const std::vector<ProjPoint>& starts,
                                                         const std::vector<double>& eps = default_eps())
{
    if (sp.kind != ScratchKind::Infinity || !sp.basic)
        throw Error(ErrorKind::InvalidArgument, "need a basic infinity scratch point");
    ConfinementReport rep;
    rep.scratch = sp;
    rep.eps = eps;
    for (const auto& c0 : starts) {
        if (c0.at_infinity()) throw Error(ErrorKind::InvalidArgument, "start point must be affine");
        cplx k = kappa(sp, c0.affine_coords());
        if (std::abs(k) < 1e-8) throw Error(ErrorKind::InvalidArgument, "start point lies on T_c");
        rep.samples.push_back({c0, sp.phase.q});

        // tracks[b][k]: branch b of the second step at eps[k]
        std::vector<std::vector<PhasePoint>> tracks;
        double last_first_dist = 1e300;
        for (std::size_t ie = 0; ie < eps.size(); ++ie) {
            PhasePoint x{c0, detail::rotate(sp.phase.q, eps[ie])};
            auto s1 = secant(C, x);
            auto i1 = detail::nearest_image(s1, sp.phase.c);
            last_first_dist = proj_distance(s1.images[i1].x.c, sp.phase.c);
            auto y1 = reflect(C, s1.images[i1].x).images[0].x;
            auto b2 = billiard_step(C, y1);
            std::vector<PhasePoint> pts;
            for (auto& im : b2.images) {
                if (im.marker) throw Error(ErrorKind::BranchLost, "second step hit " + im.marker_reason);
                for (int m = 0; m < im.multiplicity; ++m) pts.push_back(im.x);
            }
            if (ie == 0) {
                for (auto& p : pts) tracks.push_back({p});
                continue;
            }
            if (pts.size() != tracks.size()) throw Error(ErrorKind::BranchLost, "branch count changed");
            // continue each track with its nearest unused point
            std::vector<bool> used(pts.size(), false);
            for (auto& tr : tracks) {
                std::size_t bi = 0;
                double bd = 1e300;
                for (std::size_t j = 0; j < pts.size(); ++j)
                    if (!used[j] && phase_distance(pts[j], tr.back()) < bd) { bd = phase_distance(pts[j], tr.back()); bi = j; }
                used[bi] = true;
                tr.push_back(pts[bi]);
            }
        }
        if (last_first_dist > 1e-3) throw Error(ErrorKind::BranchLost, "no branch approaches the scratch point");

        std::vector<PhasePoint> lims;
        for (auto& tr : tracks) {
            auto ex = detail::extrapolate_phase(tr);
            detail::fold(rep, ex);
            lims.push_back(detail::unflatten(ex.limit));
        }
        std::vector<PhasePoint> pred;
        for (auto& im : secant_at_infinity_limit(C, {sp, -k}).images) {
            auto r = reflect(C, im.x).images[0].x;
            for (int m = 0; m < im.multiplicity; ++m) pred.push_back(r);
        }
        rep.max_prediction_error = std::max(rep.max_prediction_error, detail::set_distance(lims, pred));
        rep.limits.push_back(lims);
        rep.predicted.push_back(pred);
    }
    rep.min_pairwise_limit_distance = 1e300;
    for (std::size_t i = 0; i < rep.limits.size(); ++i)
        for (std::size_t j = i + 1; j < rep.limits.size(); ++j)
            rep.min_pairwise_limit_distance =
                std::min(rep.min_pairwise_limit_distance, detail::set_distance(rep.limits[i], rep.limits[j]));
    return rep;
}

// affine starts for the infinity experiment. |kappa| sets the scale of the local picture, so
// starts too close to the asymptote are skipped: eps must be well below |kappa|
inline std::vector<ProjPoint> infinity_starts(const PlaneCurve& C, const ScratchPoint& sp, int n, std::uint64_t seed,
                                              double min_kappa = 0.1)
{
    Sampler S(seed);
    std::vector<ProjPoint> out;
    for (int attempt = 0; int(out.size()) < n; ++attempt) {
        if (attempt > 1000) throw Error(ErrorKind::NonConvergence, "could not sample start points");
        auto c = S.curve_point(C);
        if (std::abs(kappa(sp, c.affine_coords())) >= min_kappa) out.push_back(c);
    }
    return out;
}

// points (c0, q0) of s(c x D): secant images from the fiber over the tangency point
inline std::vector<PhasePoint> isotropic_samples(const PlaneCurve& C, const ScratchPoint& sp, int n, std::uint64_t seed)
{
    Sampler S(seed);
    std::vector<PhasePoint> out;
    while (int(out.size()) < n) {
        auto q = S.direction();
        if (q.is_isotropic()) continue;
        auto s = secant(C, {sp.phase.c, q});
        for (auto& im : s.images)
            // far affine images converge too slowly for the default schedule
            if (!im.at_infinity && proj_distance(im.x.c, sp.phase.c) > 1e-3 &&
                std::abs(im.x.c.affine_coords()[0]) < 4 && std::abs(im.x.c.affine_coords()[1]) < 4) {
                out.push_back(im.x);
                break;
            }
    }
    return out;
}

inline ConfinementReport confinement_experiment_isotropic(const PlaneCurve& C, const ScratchPoint& sp,
                                                          const std::vector<PhasePoint>& samples,
                                                          const std::vector<double>& eps = default_eps())
{
    if (sp.kind == ScratchKind::Infinity || !sp.basic)
        throw Error(ErrorKind::InvalidArgument, "need a basic isotropic scratch point");
    ConfinementReport rep;
    rep.scratch = sp;
    rep.eps = eps;
    rep.samples = samples;
    for (const auto& x0 : samples) {
        std::vector<PhasePoint> seq;
        double last = 1e300;
        for (double ep : eps) {
            PhasePoint x{x0.c, detail::rotate(x0.q, ep)};
            auto s1 = secant(C, x);
            auto i1 = detail::nearest_image(s1, sp.phase.c);
            last = proj_distance(s1.images[i1].x.c, sp.phase.c);
            auto y1 = reflect(C, s1.images[i1].x).images[0].x;
            auto s2 = secant(C, y1);
            auto i2 = detail::nearest_image(s2, sp.phase.c);
            seq.push_back(reflect(C, s2.images[i2].x).images[0].x);
        }
        if (last > 1e-3) throw Error(ErrorKind::BranchLost, "no branch approaches the scratch point");
        auto ex = detail::extrapolate_phase(seq);
        detail::fold(rep, ex);
        rep.limits.push_back({detail::unflatten(ex.limit)});
    }
    rep.min_pairwise_limit_distance = 1e300;
    for (std::size_t i = 0; i < rep.limits.size(); ++i)
        for (std::size_t j = i + 1; j < rep.limits.size(); ++j)
            rep.min_pairwise_limit_distance =
                std::min(rep.min_pairwise_limit_distance, phase_distance(rep.limits[i][0], rep.limits[j][0]));
    return rep;
}

// ---------------------------------------------------------------- json

inline nlohmann::json phase_json(const PhasePoint& x) { return {{"c", vec3_json(x.c.x)}, {"q", vec3_json(x.q.q)}}; }

inline nlohmann::json scratch_json(const ScratchPoint& s)
{
    nlohmann::json j = phase_json(s.phase);
    j["kind"] = to_string(s.kind);
    j["basic"] = s.basic;
    j["tangent"] = {{s.t[0].real(), s.t[0].imag()}, {s.t[1].real(), s.t[1].imag()}};
    return j;
}

inline nlohmann::json report_json(const ConfinementReport& r)
{
    nlohmann::json j;
    j["scratch"] = scratch_json(r.scratch);
    j["samples"] = nlohmann::json::array();
    for (auto& s : r.samples) j["samples"].push_back(phase_json(s));
    j["eps"] = r.eps;
    auto sets = [](const std::vector<std::vector<PhasePoint>>& v) {
        auto a = nlohmann::json::array();
        for (auto& s : v) {
            auto b = nlohmann::json::array();
            for (auto& x : s) b.push_back(phase_json(x));
            a.push_back(b);
        }
        return a;
    };
    j["limits"] = sets(r.limits);
    j["predicted"] = sets(r.predicted);
    j["max_prediction_error"] = r.max_prediction_error;
    j["min_pairwise_limit_distance"] = r.limits.size() > 1 ? nlohmann::json(r.min_pairwise_limit_distance) : nlohmann::json();
    j["richardson_diffs"] = r.richardson_diffs;
    j["cauchy"] = r.cauchy;
    j["shrinking"] = r.shrinking;
    return j;
}

} // namespace billiards

#endif
