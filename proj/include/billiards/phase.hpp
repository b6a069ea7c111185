#ifndef BILLIARDS_PHASE_HPP
#define BILLIARDS_PHASE_HPP

#include <deque>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "curve.hpp"

namespace billiards {

// point of the conic D: Q0^2 + Q1^2 = Q2^2
struct DirectionPoint {
    Vec3 q{1.0, 0.0, 1.0};

    DirectionPoint() = default;
    explicit DirectionPoint(const Vec3& v, bool check = true) : q(ProjPoint(v).x)
    {
        if (check && conic_residual() > 1e-10)
            throw Error(ErrorKind::InvalidArgument, "direction not on the conic Q0^2 + Q1^2 = Q2^2");
    }
    DirectionPoint(cplx a, cplx b, cplx c) : DirectionPoint(Vec3{a, b, c}) {}

    cplx operator[](int i) const { return q[i]; }
    bool is_isotropic() const { return std::abs(q[2]) < 1e-8; }
    Pair slope() const { return {q[0], q[1]}; }
    double conic_residual() const { return std::abs(q[0] * q[0] + q[1] * q[1] - q[2] * q[2]); }
    ProjPoint as_point() const { return ProjPoint(q); }
};

inline double direction_point_distance(const DirectionPoint& a, const DirectionPoint& b)
{
    return proj_distance(a.as_point(), b.as_point());
}

inline DirectionPoint direction_from_slope(Pair u, int branch = 0)
{
    if (branch != 0 && branch != 1) throw Error(ErrorKind::InvalidArgument, "branch must be 0 or 1");
    u = normalize_pair(u);
    cplx s = u[0] * u[0] + u[1] * u[1];
    if (std::abs(s) < 1e-14) return DirectionPoint(Vec3{u[0], u[1], 0.0}, false);
    cplx r = std::sqrt(s);
    return DirectionPoint(Vec3{u[0], u[1], branch == 0 ? r : -r});
}

// real unit vector (cos, sin) as a point of D
inline DirectionPoint direction_from_real(double q0, double q1) { return DirectionPoint(q0, q1, 1.0); }

struct PhasePoint {
    ProjPoint c;
    DirectionPoint q;
};

inline double phase_distance(const PhasePoint& a, const PhasePoint& b)
{
    return std::max(proj_distance(a.c, b.c), direction_point_distance(a.q, b.q));
}

enum class OpTag { Secant, Reflect, Billiard };

inline const char* to_string(OpTag t)
{
    switch (t) {
    case OpTag::Secant: return "secant";
    case OpTag::Reflect: return "reflect";
    case OpTag::Billiard: return "billiard";
    }
    return "?";
}

struct Image {
    PhasePoint x;
    int multiplicity = 1;
    bool at_infinity = false;
    bool ill_conditioned = false;
    // set when a downstream step could not be applied to this branch
    std::optional<ErrorKind> marker;
    std::string marker_reason;
};

struct BranchSet {
    PhasePoint source;
    std::vector<Image> images;
    OpTag op = OpTag::Secant;

    int total_multiplicity() const
    {
        int s = 0;
        for (auto& i : images) s += i.multiplicity;
        return s;
    }
};

constexpr double kScratchTol = 1e-9;
constexpr double kIllConditioned = 1e-5;

// distance to the scratch locus at infinity: c at infinity and [q] = t(c)
inline double infinity_scratch_distance(const PlaneCurve& C, const PhasePoint& x)
{
    double h = std::abs(x.c[2]);
    if (h > kIllConditioned) return h;
    Pair t;
    try {
        t = tangent_at(C, x.c).t;
    } catch (const Error&) {
        t = {x.c[0], x.c[1]};
    }
    return std::max(h, direction_distance(x.q.slope(), t));
}

// distance to the isotropic scratch locus: q isotropic and [q] = t(c)
inline double isotropic_scratch_distance(const TangentData& td, const DirectionPoint& q)
{
    return std::max(std::abs(q[2]), direction_distance(q.slope(), td.t));
}

namespace detail {

inline void sort_images(std::vector<Image>& v)
{
    std::stable_sort(v.begin(), v.end(), [](const Image& a, const Image& b) {
        const auto& x = a.x.c.x;
        const auto& y = b.x.c.x;
        return std::make_tuple(x[0].real(), x[0].imag(), x[1].real(), x[1].imag(), x[2].real(), x[2].imag()) <
               std::make_tuple(y[0].real(), y[0].imag(), y[1].real(), y[1].imag(), y[2].real(), y[2].imag());
    });
}

inline void check_on_curve(const PlaneCurve& C, const ProjPoint& c)
{
    double r = C.residual(c);
    if (r > 1e-7) throw Error(ErrorKind::InvalidArgument, "point not on curve, residual " + std::to_string(r));
}

// points P + t V for the roots of an ascending coefficient list; trailing near-zero coefficients
// are roots at t = infinity, i.e. the point V itself
inline std::vector<std::pair<Vec3, int>> line_roots(std::vector<cplx> raw, const Vec3& P, const Vec3& V)
{
    double m = 0;
    for (auto& a : raw) m = std::max(m, std::abs(a));
    int deficit = 0;
    while (!raw.empty() && std::abs(raw.back()) <= 1e-12 * m) {
        raw.pop_back();
        ++deficit;
    }
    std::vector<std::pair<Vec3, int>> out;
    if (raw.size() >= 2) {
        ComplexPoly R(std::vector<cplx>(raw.rbegin(), raw.rend()));
        ComplexPoly dR = R.derivative();
        for (auto& r : find_roots(ComplexPoly(raw))) {
            if (std::abs(r.value) > 1 && r.multiplicity == 1) {
                // far root: polish 1/t on the reversed polynomial and build the point without dividing
                cplx w = 1.0 / r.value;
                for (int it = 0; it < 4; ++it) {
                    cplx dv = dR(w);
                    if (dv == cplx(0)) break;
                    w -= R(w) / dv;
                }
                out.push_back({{w * P[0] + V[0], w * P[1] + V[1], w * P[2]}, 1});
            } else {
                out.push_back({{P[0] + r.value * V[0], P[1] + r.value * V[1], P[2]}, r.multiplicity});
            }
        }
    }
    if (deficit > 0) out.push_back({V, deficit});
    return out;
}

} // namespace detail

inline BranchSet secant(const PlaneCurve& C, const PhasePoint& x)
{
    detail::check_on_curve(C, x.c);
    double sd = infinity_scratch_distance(C, x);
    if (sd < kScratchTol) throw Error(ErrorKind::ScratchPoint, "secant at a scratch point at infinity");

    Vec3 V{x.q[0], x.q[1], 0.0};
    double vn = std::max(std::abs(V[0]), std::abs(V[1]));
    V[0] /= vn;
    V[1] /= vn;
    auto raw = C.form().restrict_to_line(x.c.x, V);
    double m = 0;
    for (auto& a : raw) m = std::max(m, std::abs(a));
    if (m < 1e-10 * C.scale()) throw Error(ErrorKind::LineInCurve, "secant line is a component of the curve");

    BranchSet out;
    out.source = x;
    out.op = OpTag::Secant;
    const bool ill = sd < kIllConditioned;
    auto push = [&](const Vec3& p, int mult) {
        Image im{{ProjPoint(p), x.q}, mult};
        im.at_infinity = im.x.c.at_infinity();
        im.ill_conditioned = ill;
        out.images.push_back(im);
    };

    const Vec3& c = x.c.x;
    Vec3 L{c[1] * V[2] - c[2] * V[1], c[2] * V[0] - c[0] * V[2], c[0] * V[1] - c[1] * V[0]};
    double l01 = std::hypot(std::abs(L[0]), std::abs(L[1]));
    if (std::abs(c[2]) < 0.25 && l01 > 1e-8 * std::abs(L[2])) {
        // far base point: c + t V would cancel for the near images, so restart from the foot P of the
        // line nearest the origin. In w = s/t on s P + t V the base point sits at the small root
        // w_c = c2 / t_c, where forward deflation is stable
        Vec3 P{-L[2] * std::conj(L[0]) / (l01 * l01), -L[2] * std::conj(L[1]) / (l01 * l01), 1.0};
        int iv = std::abs(V[0]) >= std::abs(V[1]) ? 0 : 1;
        cplx tc = (c[iv] - c[2] * P[iv]) / V[iv];
        cplx wc = c[2] / tc;
        auto a = C.form().restrict_to_line(P, V);
        const std::size_t n = a.size() - 1;
        std::vector<cplx> g(n);
        cplx acc = 0;
        for (std::size_t j = n; j-- > 0;) {
            acc = acc * wc + a[n - (j + 1)];
            g[j] = acc;
        }
        std::vector<cplx> b(n);
        for (std::size_t k = 0; k < n; ++k) b[k] = g[n - 1 - k];
        for (auto& [p, m] : detail::line_roots(b, P, V)) push(p, m);
    } else {
        // the base point contributes t = 0 once
        std::vector<cplx> tail(raw.begin() + 1, raw.end());
        for (auto& [p, m] : detail::line_roots(tail, c, V)) push(p, m);
    }
    detail::sort_images(out.images);
    return out;
}

inline BranchSet reflect(const PlaneCurve& C, const PhasePoint& x)
{
    detail::check_on_curve(C, x.c);
    if (x.c.at_infinity()) throw Error(ErrorKind::InfinityBasePoint, "reflect at a point at infinity");
    auto td = tangent_at(C, x.c);
    double sd = isotropic_scratch_distance(td, x.q);
    if (sd < kScratchTol) throw Error(ErrorKind::ScratchPoint, "reflect at an isotropic scratch point");

    // work in the isotropic basis u = (1, i), w = (1, -i), where v.v' = 2 (a b' + b a').
    // Reflection across t becomes q' = -(b_q a_n^2) u - (a_q b_n^2) w, Q2' = a_n b_n Q2 (projectively),
    // which has no cancellation when q and n are both close to an isotropic direction.
    auto coords = [](cplx v0, cplx v1) { return std::pair<cplx, cplx>{(v0 - cplx(0, 1) * v1) / 2.0, (v0 + cplx(0, 1) * v1) / 2.0}; };
    auto [an, bn] = coords(td.n[0], td.n[1]);
    const auto& q = x.q.q;
    auto [aq, bq] = coords(q[0], q[1]);
    // on D, a_q b_q = Q2^2 / 4 exactly; recover the small coordinate from it
    if (std::abs(aq) >= std::abs(bq)) {
        if (aq != cplx(0)) bq = q[2] * q[2] / (4.0 * aq);
    } else {
        aq = q[2] * q[2] / (4.0 * bq);
    }
    cplx cu = -bq * an * an, cw = -aq * bn * bn;
    Vec3 r{cu + cw, cplx(0, 1) * (cu - cw), an * bn * q[2]};
    BranchSet out;
    out.source = x;
    out.op = OpTag::Reflect;
    Image im{{x.c, DirectionPoint(r, false)}, 1};
    im.ill_conditioned = sd < kIllConditioned;
    out.images.push_back(im);
    return out;
}

inline BranchSet billiard_step(const PlaneCurve& C, const PhasePoint& x)
{
    auto s = secant(C, x);
    BranchSet out;
    out.source = x;
    out.op = OpTag::Billiard;
    for (auto& im : s.images) {
        Image o = im;
        if (im.at_infinity) {
            o.marker = ErrorKind::InfinityBasePoint;
            o.marker_reason = "secant image at infinity";
            out.images.push_back(o);
            continue;
        }
        try {
            auto r = reflect(C, im.x);
            o.x = r.images[0].x;
            o.ill_conditioned = im.ill_conditioned || r.images[0].ill_conditioned;
        } catch (const Error& e) {
            o.marker = e.kind();
            o.marker_reason = std::string("reflect: ") + e.what();
        }
        out.images.push_back(o);
    }
    return out;
}

// classical billiard map on a real table
inline PhasePoint real_billiard_step(const PlaneCurve& C, const PhasePoint& x)
{
    if (!C.real_coefficients()) throw Error(ErrorKind::InvalidArgument, "curve must have real coefficients");
    if (x.c.at_infinity() || x.q.is_isotropic()) throw Error(ErrorKind::InvalidArgument, "need an affine real point");
    auto a = x.c.affine_coords();
    cplx v0 = x.q[0] / x.q[2], v1 = x.q[1] / x.q[2];
    for (cplx z : {a[0], a[1], v0, v1})
        if (std::abs(z.imag()) > 1e-12 * (1 + std::abs(z))) throw Error(ErrorKind::InvalidArgument, "data not real");
    detail::check_on_curve(C, x.c);

    auto raw = C.form().restrict_to_line({a[0].real(), a[1].real(), 1.0}, {v0.real(), v1.real(), 0.0});
    double m = 0;
    for (auto& c : raw) m = std::max(m, std::abs(c));
    if (m < 1e-10 * C.scale()) throw Error(ErrorKind::LineInCurve, "ray lies in the curve");
    ComplexPoly p(raw);
    double best = std::numeric_limits<double>::infinity();
    if (p.degree() >= 1)
        for (auto& r : find_roots(p)) {
            double t = r.value.real();
            if (t > 1e-10 && std::abs(r.value.imag()) < 1e-8 * (1 + std::abs(t))) best = std::min(best, t);
        }
    if (!std::isfinite(best)) throw Error(ErrorKind::NoRealReturn, "ray does not re-meet the real curve");

    double x0 = a[0].real() + best * v0.real(), x1 = a[1].real() + best * v1.real();
    auto g = C.gradient({x0, x1, 1.0});
    double g0 = g[0].real(), g1 = g[1].real();
    double gn = g0 * g0 + g1 * g1;
    if (gn == 0) throw Error(ErrorKind::SingularPoint, "singular hit point");
    // mirror the velocity in the tangent line: v - 2 (v.g) g / |g|^2
    double vg = v0.real() * g0 + v1.real() * g1;
    double w0 = v0.real() - 2 * vg * g0 / gn, w1 = v1.real() - 2 * vg * g1 / gn;
    double wn = std::hypot(w0, w1);
    return {ProjPoint(x0, x1, 1.0), direction_from_real(w0 / wn, w1 / wn)};
}

// ---------------------------------------------------------------- orbit tree

struct OrbitNode {
    PhasePoint x;
    int level = 0;
    int parent = -1;  // index into the previous level
    long long mult = 1;
    bool ill_conditioned = false;
    std::optional<std::string> terminated;
};

struct OrbitTree {
    PhasePoint root;
    int depth = 0;
    std::vector<std::vector<OrbitNode>> levels;

    long long live_mass(int k) const
    {
        long long s = 0;
        for (auto& n : levels[k])
            if (!n.terminated) s += n.mult;
        return s;
    }
    long long terminated_mass(int k) const
    {
        long long s = 0;
        for (auto& n : levels[k])
            if (n.terminated) s += n.mult;
        return s;
    }
};

inline OrbitTree orbit_tree(const PlaneCurve& C, const PhasePoint& x, int m)
{
    if (m < 0) throw Error(ErrorKind::InvalidArgument, "depth must be >= 0");
    OrbitTree T;
    T.root = x;
    T.depth = m;
    T.levels.push_back({OrbitNode{x, 0, -1, 1, false, std::nullopt}});
    const int d = C.degree();
    for (int k = 1; k <= m; ++k) {
        std::vector<OrbitNode> next;
        const auto& prev = T.levels[k - 1];
        for (int idx = 0; idx < int(prev.size()); ++idx) {
            const auto& node = prev[idx];
            if (node.terminated) continue;
            try {
                auto b = billiard_step(C, node.x);
                for (auto& im : b.images) {
                    OrbitNode ch{im.x, k, idx, node.mult * im.multiplicity, im.ill_conditioned, std::nullopt};
                    if (im.marker) ch.terminated = std::string(to_string(*im.marker)) + ": " + im.marker_reason;
                    next.push_back(ch);
                }
            } catch (const Error& e) {
                // the whole fiber is lost; keep its mass as a single terminated child
                next.push_back({node.x, k, idx, node.mult * (d - 1), node.ill_conditioned,
                                std::string(to_string(e.kind())) + ": " + e.what()});
            }
        }
        T.levels.push_back(std::move(next));
    }
    return T;
}

inline nlohmann::json vec3_json(const Vec3& v)
{
    auto j = nlohmann::json::array();
    for (auto& z : v) j.push_back({z.real(), z.imag()});
    return j;
}

inline void write_orbit_jsonl(const OrbitTree& T, std::ostream& os)
{
    for (auto& lvl : T.levels)
        for (auto& n : lvl) {
            nlohmann::json j{{"level", n.level}, {"parent_index", n.parent}, {"c", vec3_json(n.x.c.x)},
                             {"q", vec3_json(n.x.q.q)}, {"mult", n.mult}};
            if (n.ill_conditioned) j["ill_conditioned"] = true;
            if (n.terminated) j["terminated_reason"] = *n.terminated;
            os << j.dump() << "\n";
        }
}

} // namespace billiards

#endif
