#ifndef BILLIARDS_SYMPLECTIC_HPP
#define BILLIARDS_SYMPLECTIC_HPP

#include <cmath>

#include "phase.hpp"
#include "sampling.hpp"

namespace billiards {

// Local coordinates (s, u) near (c, q):
//   curve: x(s) = c + s t + lambda(s) n, lambda from Newton, with t the unit tangent and n = (g0, g1) / |g|
//   conic (q2 = 1): chart A q(u) = ((1 - u^2), 2u) / (1 + u^2), chart B q(u) = ((u^2 - 1), 2u) / (1 + u^2)
struct LocalFrame {
    PhasePoint base;
    Pair c;
    Pair t, n;
    int chart = 0;  // 0: u = q1 / (1 + q0), 1: u = q1 / (1 - q0)
    cplx u0 = 0;
    double s_sign = 1, u_sign = 1;

    LocalFrame flipped() const
    {
        LocalFrame f = *this;
        f.s_sign = -s_sign;
        f.u_sign = -u_sign;
        return f;
    }
};

struct FormDensity {
    cplx value = 0;
    bool degenerate = false;  // zero of the pulled-back form
};

namespace detail {

inline Pair conic_q(int chart, cplx u)
{
    cplx d = 1.0 + u * u;
    if (chart == 0) return {(1.0 - u * u) / d, 2.0 * u / d};
    return {(u * u - 1.0) / d, 2.0 * u / d};
}

inline Pair conic_dq(int chart, cplx u)
{
    cplx d = (1.0 + u * u) * (1.0 + u * u);
    cplx q0 = 4.0 * u / d;
    return {chart == 0 ? -q0 : q0, 2.0 * (1.0 - u * u) / d};
}

inline cplx conic_u(int chart, const Pair& q) { return chart == 0 ? q[1] / (1.0 + q[0]) : q[1] / (1.0 - q[0]); }

inline Pair affine_direction(const DirectionPoint& q)
{
    if (q.is_isotropic()) throw Error(ErrorKind::IsotropicFrame, "direction on the isotropic line at infinity");
    return {q[0] / q[2], q[1] / q[2]};
}

} // namespace detail

inline LocalFrame make_frame(const PlaneCurve& C, const PhasePoint& x)
{
    if (x.c.at_infinity()) throw Error(ErrorKind::InvalidArgument, "frame needs an affine base point");
    Pair qa = detail::affine_direction(x.q);
    tangent_at(C, x.c);  // throws at singular points
    LocalFrame f;
    f.base = x;
    f.c = x.c.affine_coords();
    Vec3 g = C.gradient(x.c.x);
    double gn = std::hypot(std::abs(g[0]), std::abs(g[1]));
    if (std::abs(g[0] * g[0] + g[1] * g[1]) < 1e-10 * gn * gn)
        throw Error(ErrorKind::IsotropicFrame, "isotropic tangent line");
    f.n = {g[0] / gn, g[1] / gn};
    f.t = {f.n[1], -f.n[0]};
    cplx uA = detail::conic_u(0, qa);
    f.chart = std::abs(1.0 + qa[0]) < 1e-12 || std::abs(uA) > 2 ? 1 : 0;
    f.u0 = detail::conic_u(f.chart, qa);
    if (std::abs(1.0 + f.u0 * f.u0) < 1e-10) throw Error(ErrorKind::IsotropicFrame, "conic chart pole");
    return f;
}

inline ProjPoint frame_curve_point(const PlaneCurve& C, const LocalFrame& f, cplx s)
{
    s *= f.s_sign;
    cplx lam = 0;
    for (int it = 0; it < 50; ++it) {
        Vec3 X{f.c[0] + s * f.t[0] + lam * f.n[0], f.c[1] + s * f.t[1] + lam * f.n[1], 1.0};
        Vec3 g = C.gradient(X);
        cplx dl = C.form()(X) / (g[0] * f.n[0] + g[1] * f.n[1]);
        lam -= dl;
        if (std::abs(dl) < 1e-17 * (1 + std::abs(lam))) break;
    }
    return ProjPoint::affine(f.c[0] + s * f.t[0] + lam * f.n[0], f.c[1] + s * f.t[1] + lam * f.n[1]);
}

inline DirectionPoint frame_direction(const LocalFrame& f, cplx du)
{
    auto q = detail::conic_q(f.chart, f.u0 + f.u_sign * du);
    return DirectionPoint(Vec3{q[0], q[1], 1.0}, false);
}

inline PhasePoint frame_point(const PlaneCurve& C, const LocalFrame& f, cplx s, cplx du)
{
    return {frame_curve_point(C, f, s), frame_direction(f, du)};
}

// inverse chart: (s, u - u0) of a nearby phase point
inline std::array<cplx, 2> frame_coords(const LocalFrame& f, const PhasePoint& y)
{
    if (y.c.at_infinity()) throw Error(ErrorKind::InvalidArgument, "point at infinity has no frame coordinates");
    auto a = y.c.affine_coords();
    cplx d0 = a[0] - f.c[0], d1 = a[1] - f.c[1];
    // d = s t + lam n
    cplx det = f.t[0] * f.n[1] - f.t[1] * f.n[0];
    cplx s = (d0 * f.n[1] - d1 * f.n[0]) / det;
    cplx u = detail::conic_u(f.chart, detail::affine_direction(y.q));
    return {f.s_sign * s, f.u_sign * (u - f.u0)};
}

inline FormDensity form_density(const PlaneCurve& C, const LocalFrame& f)
{
    (void)C;
    auto dq = detail::conic_dq(f.chart, f.u0);
    FormDensity r;
    r.value = f.s_sign * f.u_sign * (f.t[0] * dq[0] + f.t[1] * dq[1]);
    r.degenerate = std::abs(r.value) < 1e-12 * (std::abs(dq[0]) + std::abs(dq[1]));
    return r;
}

inline FormDensity form_density(const PlaneCurve& C, const PhasePoint& x) { return form_density(C, make_frame(C, x)); }

struct InvarianceResult {
    OpTag op = OpTag::Reflect;
    int branch = 0;
    double h = 0;
    double residual_h = 0, residual_h2 = 0;
    double order = 0;  // log2(residual_h / residual_h2)
    cplx a_source = 0, a_image = 0;
};

namespace detail {

inline BranchSet apply_op(const PlaneCurve& C, const PhasePoint& x, OpTag op)
{
    switch (op) {
    case OpTag::Secant: return secant(C, x);
    case OpTag::Reflect: return reflect(C, x);
    case OpTag::Billiard: return billiard_step(C, x);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown op");
}

constexpr double kBranchJump = 0.1;

inline PhasePoint follow(const PlaneCurve& C, const PhasePoint& x, OpTag op, const PhasePoint& target)
{
    auto b = apply_op(C, x, op);
    double bd = 1e300;
    const PhasePoint* best = nullptr;
    for (auto& im : b.images) {
        double d = phase_distance(im.x, target);
        if (d < bd) { bd = d; best = &im.x; }
    }
    if (!best || bd > kBranchJump) throw Error(ErrorKind::BranchJump, "continuation distance " + std::to_string(bd));
    return *best;
}

inline double jacobian_residual(const PlaneCurve& C, const LocalFrame& src, const LocalFrame& img, OpTag op,
                                double h, cplx a_src, cplx a_img)
{
    auto coords = [&](cplx s, cplx du) {
        return frame_coords(img, follow(C, frame_point(C, src, s, du), op, img.base));
    };
    auto sp = coords(h, 0.0), sm = coords(-h, 0.0), up = coords(0.0, h), um = coords(0.0, -h);
    cplx J00 = (sp[0] - sm[0]) / (2 * h), J10 = (sp[1] - sm[1]) / (2 * h);
    cplx J01 = (up[0] - um[0]) / (2 * h), J11 = (up[1] - um[1]) / (2 * h);
    cplx det = J00 * J11 - J01 * J10;
    return std::abs(a_img * det - a_src) / std::abs(a_src);
}

} // namespace detail

inline InvarianceResult check_invariance(const PlaneCurve& C, const PhasePoint& x, OpTag op, int branch = 0, double h = 1e-4)
{
    auto b = detail::apply_op(C, x, op);
    if (branch < 0 || branch >= int(b.images.size())) throw Error(ErrorKind::InvalidArgument, "branch index out of range");
    const auto& y = b.images[branch];
    if (y.marker) throw Error(*y.marker, y.marker_reason);
    if (y.multiplicity > 1) throw Error(ErrorKind::InvalidArgument, "branch is not simple");

    LocalFrame fs = make_frame(C, x), fi = make_frame(C, y.x);
    fi.base = y.x;
    auto as = form_density(C, fs), ai = form_density(C, fi);
    if (as.degenerate || ai.degenerate) throw Error(ErrorKind::InvalidArgument, "form vanishes at the sample");

    InvarianceResult r;
    r.op = op;
    r.branch = branch;
    r.h = h;
    r.a_source = as.value;
    r.a_image = ai.value;
    r.residual_h = detail::jacobian_residual(C, fs, fi, op, h, as.value, ai.value);
    r.residual_h2 = detail::jacobian_residual(C, fs, fi, op, h / 2, as.value, ai.value);
    r.order = std::log2(r.residual_h / r.residual_h2);
    return r;
}

// samples where the affine frames are well scaled: bounded points, directions away from the
// isotropic line at infinity, for the sample and every secant and billiard image
inline bool well_framed(const PhasePoint& x, double box = 3, double q2_min = 0.25)
{
    if (x.c.at_infinity()) return false;
    auto a = x.c.affine_coords();
    if (std::abs(a[0]) > box || std::abs(a[1]) > box) return false;
    return std::abs(x.q[2]) >= q2_min * std::max(std::abs(x.q[0]), std::abs(x.q[1]));
}

inline PhasePoint form_check_sample(const PlaneCurve& C, Sampler& S)
{
    for (int attempt = 0; attempt < 10000; ++attempt) {
        auto x = S.phase_point(C);
        if (!well_framed(x)) continue;
        bool ok = true;
        for (OpTag op : {OpTag::Secant, OpTag::Billiard})
            for (auto& im : detail::apply_op(C, x, op).images) ok = ok && !im.marker && well_framed(im.x);
        if (ok) return x;
    }
    throw Error(ErrorKind::NonConvergence, "could not sample a well-framed phase point");
}

} // namespace billiards

#endif
