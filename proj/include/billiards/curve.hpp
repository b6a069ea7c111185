#ifndef BILLIARDS_CURVE_HPP
#define BILLIARDS_CURVE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "bigint.hpp"
#include "poly.hpp"

namespace billiards {

using Vec3 = std::array<cplx, 3>;
using Pair = std::array<cplx, 2>;

struct GaussRat {
    BigRat re = 0, im = 0;
    bool is_zero() const { return re == 0 && im == 0; }
    cplx to_complex() const { return {re.convert_to<double>(), im.convert_to<double>()}; }
};

// ---------------------------------------------------------------- points

struct ProjPoint {
    Vec3 x{1.0, 0.0, 0.0};

    ProjPoint() = default;
    ProjPoint(cplx a, cplx b, cplx c) : x{a, b, c} { normalize(); }
    explicit ProjPoint(const Vec3& v) : x(v) { normalize(); }
    static ProjPoint affine(cplx a, cplx b) { return ProjPoint(a, b, 1.0); }

    cplx operator[](int i) const { return x[i]; }
    bool at_infinity() const { return std::abs(x[2]) < 1e-8; }
    Pair affine_coords() const { return {x[0] / x[2], x[1] / x[2]}; }

    static int pivot(const Vec3& v)
    {
        double m = std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
        for (int i = 0; i < 3; ++i)
            if (std::abs(v[i]) >= (1 - 1e-12) * m) return i;
        return 0;
    }

private:
    void normalize()
    {
        if (x[0] == cplx(0) && x[1] == cplx(0) && x[2] == cplx(0))
            throw Error(ErrorKind::InvalidArgument, "zero projective point");
        int k = pivot(x);
        cplx inv = 1.0 / x[k];
        for (int i = 0; i < 3; ++i) x[i] = i == k ? cplx(1) : x[i] * inv;
    }
};

inline double proj_distance(const ProjPoint& a, const ProjPoint& b)
{
    auto one = [](const Vec3& u, const Vec3& v) {
        int k = ProjPoint::pivot(u);
        if (std::abs(v[k]) < 1e-300) return 1e300;
        double m = 0;
        for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(u[i] / u[k] - v[i] / v[k]));
        return m;
    };
    return std::min(one(a.x, b.x), one(b.x, a.x));
}

inline Pair normalize_pair(Pair p)
{
    int k = std::abs(p[1]) > std::abs(p[0]) * (1 + 1e-12) ? 1 : 0;
    if (p[k] == cplx(0)) throw Error(ErrorKind::InvalidArgument, "zero direction pair");
    cplx inv = 1.0 / p[k];
    p[1 - k] *= inv;
    p[k] = 1;
    return p;
}

// sine-like distance between two points of P^1
inline double direction_distance(const Pair& a, const Pair& b)
{
    double na = std::hypot(std::abs(a[0]), std::abs(a[1]));
    double nb = std::hypot(std::abs(b[0]), std::abs(b[1]));
    return std::abs(a[0] * b[1] - a[1] * b[0]) / (na * nb);
}

// ---------------------------------------------------------------- forms

struct Term {
    int i, j, k;
    cplx a;
};

// homogeneous form in X0, X1, X2
class HomForm {
public:
    HomForm() = default;
    HomForm(int degree, std::vector<Term> terms) : d_(degree), t_(std::move(terms)) {}

    int degree() const { return d_; }
    const std::vector<Term>& terms() const { return t_; }

    cplx operator()(const Vec3& X) const
    {
        cplx s = 0;
        for (auto& t : t_) s += t.a * ipow(X[0], t.i) * ipow(X[1], t.j) * ipow(X[2], t.k);
        return s;
    }

    HomForm partial(int var) const
    {
        std::vector<Term> out;
        for (auto t : t_) {
            int e = var == 0 ? t.i : (var == 1 ? t.j : t.k);
            if (e == 0) continue;
            t.a *= double(e);
            (var == 0 ? t.i : (var == 1 ? t.j : t.k)) -= 1;
            out.push_back(t);
        }
        return HomForm(d_ - 1, std::move(out));
    }

    friend HomForm operator+(const HomForm& a, const HomForm& b)
    {
        std::map<std::tuple<int, int, int>, cplx> m;
        for (auto& t : a.t_) m[{t.i, t.j, t.k}] += t.a;
        for (auto& t : b.t_) m[{t.i, t.j, t.k}] += t.a;
        std::vector<Term> out;
        for (auto& [e, v] : m)
            if (v != cplx(0)) out.push_back({std::get<0>(e), std::get<1>(e), std::get<2>(e), v});
        return HomForm(a.d_, std::move(out));
    }
    HomForm scaled(cplx s) const
    {
        HomForm r = *this;
        for (auto& t : r.t_) t.a *= s;
        return r;
    }

    double coeff_scale() const
    {
        double s = 0;
        for (auto& t : t_) s = std::max(s, std::abs(t.a));
        return s;
    }

    // raw coefficients of t -> F(P + t V), ascending, length degree + 1 (not trimmed)
    std::vector<cplx> restrict_to_line(const Vec3& P, const Vec3& V) const
    {
        std::array<std::vector<std::vector<cplx>>, 3> pw;
        for (int c = 0; c < 3; ++c) {
            pw[c].push_back({1.0});
            for (int e = 1; e <= d_; ++e) {
                const auto& prev = pw[c].back();
                std::vector<cplx> nx(prev.size() + 1, 0.0);
                for (std::size_t q = 0; q < prev.size(); ++q) {
                    nx[q] += prev[q] * P[c];
                    nx[q + 1] += prev[q] * V[c];
                }
                pw[c].push_back(nx);
            }
        }
        std::vector<cplx> out(d_ + 1, 0.0);
        for (auto& t : t_) {
            const auto& a = pw[0][t.i];
            const auto& b = pw[1][t.j];
            const auto& c = pw[2][t.k];
            std::vector<cplx> ab(a.size() + b.size() - 1, 0.0);
            for (std::size_t p = 0; p < a.size(); ++p)
                for (std::size_t q = 0; q < b.size(); ++q) ab[p + q] += a[p] * b[q];
            for (std::size_t p = 0; p < ab.size(); ++p)
                for (std::size_t q = 0; q < c.size(); ++q) out[p + q] += t.a * ab[p] * c[q];
        }
        return out;
    }

private:
    static cplx ipow(cplx z, int e)
    {
        cplx r = 1;
        for (int q = 0; q < e; ++q) r *= z;
        return r;
    }
    int d_ = 0;
    std::vector<Term> t_;
};

// ---------------------------------------------------------------- curve

struct TangentData {
    ProjPoint point;
    Pair t;
    Pair n;
};

struct PointMult {
    ProjPoint point;
    int multiplicity = 1;
};

class PlaneCurve {
public:
    using Key = std::tuple<int, int, int>;

    PlaneCurve(int degree, std::map<Key, GaussRat> coeffs) : d_(degree), exact_(std::move(coeffs))
    {
        if (d_ < 2) throw Error(ErrorKind::InvalidArgument, "curve degree must be >= 2");
        std::vector<Term> terms;
        bool any = false;
        for (auto& [e, c] : exact_) {
            auto [i, j, k] = e;
            if (i < 0 || j < 0 || k < 0 || i + j + k != d_)
                throw Error(ErrorKind::InvalidArgument, "monomial exponents must sum to the degree");
            if (c.is_zero()) continue;
            any = true;
            terms.push_back({i, j, k, c.to_complex()});
        }
        if (!any) throw Error(ErrorKind::InvalidArgument, "all coefficients are zero");
        F_ = HomForm(d_, terms);
        for (int v = 0; v < 3; ++v) dF_[v] = F_.partial(v);
    }

    // convenience for integer/rational real coefficients given as (i, j, k, num, den)
    static PlaneCurve from_real(int degree, std::vector<std::tuple<int, int, int, long long, long long>> cs)
    {
        std::map<Key, GaussRat> m;
        for (auto& [i, j, k, num, den] : cs) m[{i, j, k}].re += BigRat(num, den);
        return PlaneCurve(degree, m);
    }

    int degree() const { return d_; }
    const HomForm& form() const { return F_; }
    const HomForm& partial(int v) const { return dF_[v]; }
    const std::map<Key, GaussRat>& exact_coeffs() const { return exact_; }
    double scale() const { return F_.coeff_scale(); }

    bool real_coefficients() const
    {
        for (auto& [e, c] : exact_)
            if (c.im != 0) return false;
        return true;
    }

    cplx evaluate(const ProjPoint& p) const { return F_(p.x); }
    Vec3 gradient(const Vec3& X) const { return {dF_[0](X), dF_[1](X), dF_[2](X)}; }

    // |F(p)| relative to the coefficient scale at a normalized point
    double residual(const ProjPoint& p) const { return std::abs(evaluate(p)) / scale(); }

private:
    int d_;
    std::map<Key, GaussRat> exact_;
    HomForm F_;
    std::array<HomForm, 3> dF_;
};

inline cplx evaluate(const PlaneCurve& C, const ProjPoint& p) { return C.evaluate(p); }

inline std::vector<PointMult> points_at_infinity(const PlaneCurve& C)
{
    // binary form g(X0, X1) = F(X0, X1, 0), solved along X0 = 1; the deficit is [0:1:0]
    const int d = C.degree();
    auto raw = C.form().restrict_to_line({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    double s = 0;
    for (auto& a : raw) s = std::max(s, std::abs(a));
    if (s <= 1e-14 * C.scale())
        throw Error(ErrorKind::ContainsInfinityLine, "F(X0, X1, 0) vanishes identically");
    ComplexPoly g(raw);
    std::vector<PointMult> out;
    if (g.degree() >= 1)
        for (auto& r : find_roots(g)) out.push_back({ProjPoint(1.0, r.value, 0.0), r.multiplicity});
    if (g.degree() < d) out.push_back({ProjPoint(0.0, 1.0, 0.0), d - g.degree()});
    return out;
}

inline TangentData tangent_at(const PlaneCurve& C, const ProjPoint& p)
{
    double res = C.residual(p);
    if (res > 1e-8) throw Error(ErrorKind::InvalidArgument, "point not on curve, residual " + std::to_string(res));
    Vec3 g = C.gradient(p.x);
    double gn = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
    if (gn < 1e-10 * C.scale()) throw Error(ErrorKind::SingularPoint, "gradient vanishes");
    TangentData td;
    td.point = p;
    if (std::abs(g[0]) + std::abs(g[1]) < 1e-14 * gn)
        throw Error(ErrorKind::SingularPoint, "tangent line is the line at infinity");
    td.t = normalize_pair({g[1], -g[0]});
    td.n = {-td.t[1], td.t[0]};
    return td;
}

// ---------------------------------------------------------------- bivariate systems

namespace detail {

inline cplx det_lu(std::vector<cplx> A, int n)
{
    cplx det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r * n + c]) > std::abs(A[piv * n + c])) piv = r;
        if (A[piv * n + c] == cplx(0)) return 0;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
            det = -det;
        }
        det *= A[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            cplx f = A[r * n + c] / A[c * n + c];
            if (f == cplx(0)) continue;
            for (int k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
        }
    }
    return det;
}

inline cplx sylvester_det(const std::vector<cplx>& p, const std::vector<cplx>& q)
{
    const int m = int(p.size()) - 1, n = int(q.size()) - 1;
    const int N = m + n;
    if (N == 0) return 1;
    std::vector<cplx> S(std::size_t(N) * N, 0.0);
    // rows hold descending coefficients
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) S[r * N + r + k] = p[m - k];
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) S[(n + r) * N + r + k] = q[n - k];
    return det_lu(S, N);
}

inline const cplx shear_alpha{0.3183098861837907, 0.1234567901234568};

} // namespace detail

struct AffineSolution {
    Pair x;
    int multiplicity = 1;
    double residual = 0;
};

// Affine common zeros of two forms (X2 = 1): Sylvester resultant in the sheared variable v,
// x0 = u + alpha v, x1 = v, sampled on a circle and interpolated in u, then 2-variable Newton.
inline std::vector<AffineSolution> solve_affine_system(const HomForm& G1, const HomForm& G2)
{
    const int m = G1.degree(), n = G2.degree();
    const int N = m * n + 1;
    const Vec3 dir{detail::shear_alpha, 1.0, 0.0};
    const double s1 = G1.coeff_scale(), s2 = G2.coeff_scale();
    if (s1 == 0 || s2 == 0) throw Error(ErrorKind::DegenerateSystem, "zero form");

    auto resultant_poly = [&](double rho) {
        std::vector<cplx> vals(N);
        for (int k = 0; k < N; ++k) {
            cplx u = std::polar(rho, 2 * M_PI * k / N);
            auto p = G1.restrict_to_line({u, 0.0, 1.0}, dir);
            auto q = G2.restrict_to_line({u, 0.0, 1.0}, dir);
            for (auto& a : p) a /= s1;
            for (auto& a : q) a /= s2;
            vals[k] = detail::sylvester_det(p, q);
        }
        std::vector<cplx> c(N, 0.0);
        for (int j = 0; j < N; ++j) {
            cplx s = 0;
            for (int k = 0; k < N; ++k) s += vals[k] * std::polar(1.0, -2 * M_PI * double(j) * k / N);
            c[j] = s / double(N) / std::pow(rho, j);
        }
        return c;
    };

    auto c = resultant_poly(1.0);
    double cmax = 0;
    for (auto& a : c) cmax = std::max(cmax, std::abs(a));
    if (cmax < 1e-13) throw Error(ErrorKind::DegenerateSystem, "resultant vanishes identically");
    ComplexPoly R(c);
    if (R.degree() >= 1) {
        // rescale the sampling circle to the typical root size and redo
        double rho = std::pow(std::abs(R[0] / R.leading()), 1.0 / R.degree());
        if (std::isfinite(rho) && rho > 0 && (rho > 2 || rho < 0.5)) R = ComplexPoly(resultant_poly(rho));
    }
    std::vector<AffineSolution> out;
    if (R.degree() < 1) return out;

    auto newton = [&](Pair x) {
        for (int it = 0; it < 30; ++it) {
            Vec3 X{x[0], x[1], 1.0};
            cplx f1 = G1(X), f2 = G2(X);
            cplx a = G1.partial(0)(X), b = G1.partial(1)(X);
            cplx c2 = G2.partial(0)(X), d2 = G2.partial(1)(X);
            cplx det = a * d2 - b * c2;
            if (det == cplx(0)) break;
            cplx dx0 = (f1 * d2 - b * f2) / det, dx1 = (a * f2 - c2 * f1) / det;
            x[0] -= dx0;
            x[1] -= dx1;
            if (std::abs(dx0) + std::abs(dx1) < 1e-15 * (1 + std::abs(x[0]) + std::abs(x[1]))) break;
        }
        return x;
    };

    for (auto& rc : find_roots(R)) {
        cplx u = rc.value;
        auto p = G1.restrict_to_line({u, 0.0, 1.0}, dir);
        ComplexPoly pp(p);
        cplx best_v = 0;
        double best = 1e300;
        if (pp.degree() >= 1)
            for (auto& vr : find_roots(pp)) {
                Vec3 X{u + detail::shear_alpha * vr.value, vr.value, 1.0};
                double r = std::abs(G2(X)) / s2;
                if (r < best) { best = r; best_v = vr.value; }
            }
        Pair x{u + detail::shear_alpha * best_v, best_v};
        if (rc.multiplicity == 1) x = newton(x);
        Vec3 X{x[0], x[1], 1.0};
        double scale = std::pow(std::max(1.0, std::max(std::abs(x[0]), std::abs(x[1]))), std::max(m, n));
        double res = std::max(std::abs(G1(X)) / s1, std::abs(G2(X)) / s2) / scale;
        out.push_back({x, rc.multiplicity, res});
    }
    return out;
}

inline HomForm isotropic_form(const PlaneCurve& C, int sign)
{
    return C.partial(0) + C.partial(1).scaled(cplx(0, double(sign)));
}

// affine points where the tangent has direction [1 : sign*i]
inline std::vector<PointMult> isotropic_tangency_points(const PlaneCurve& C, int sign)
{
    if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
    auto sols = solve_affine_system(C.form(), isotropic_form(C, sign));
    std::vector<PointMult> out;
    for (auto& s : sols) out.push_back({ProjPoint::affine(s.x[0], s.x[1]), s.multiplicity});
    std::sort(out.begin(), out.end(), [](const PointMult& a, const PointMult& b) {
        auto A = a.point.affine_coords(), B = b.point.affine_coords();
        return std::make_tuple(A[0].real(), A[0].imag(), A[1].real(), A[1].imag()) <
               std::make_tuple(B[0].real(), B[0].imag(), B[1].real(), B[1].imag());
    });
    return out;
}

// ---------------------------------------------------------------- genericity

struct GenericityReport {
    bool irreducible_heuristic = false;
    bool smooth = false;
    bool distinct_infinity_points = false;
    bool non_isotropic_infinity_tangents = false;
    bool simple_isotropic_tangencies = false;
    std::vector<std::string> diagnostics;
    bool all() const
    {
        return irreducible_heuristic && smooth && distinct_infinity_points && non_isotropic_infinity_tangents &&
               simple_isotropic_tangencies;
    }
};

namespace detail {

inline std::string fmt_point(const ProjPoint& p)
{
    char buf[200];
    std::snprintf(buf, sizeof buf, "[%.6g%+.6gi : %.6g%+.6gi : %.6g%+.6gi]", p[0].real(), p[0].imag(), p[1].real(),
                  p[1].imag(), p[2].real(), p[2].imag());
    return buf;
}

// does F vanish on some line X1 = sign*i*X0 + c*X2 ?
inline bool has_isotropic_line(const PlaneCurve& C, int sign, std::vector<std::string>& diag)
{
    const int d = C.degree();
    const cplx is(0, double(sign));
    // coefficient of X0^(d-e) X2^e as a polynomial in c
    std::vector<std::vector<cplx>> P(d + 1, std::vector<cplx>(d + 1, 0.0));
    for (auto& t : C.form().terms())
        for (int k = 0; k <= t.j; ++k) {
            int e = t.k + k;
            P[e][k] += t.a * binom(t.j, k) * std::pow(is, t.j - k);
        }
    const double tol = 1e-9 * C.scale();
    // a nonzero constant coefficient rules out every c
    int pick = -1, pick_deg = 1 << 30;
    for (int e = 0; e <= d; ++e) {
        ComplexPoly pe(P[e]);
        if (pe.scale() <= tol) continue;
        if (pe.degree() == 0) return false;
        if (pe.degree() < pick_deg) { pick = e; pick_deg = pe.degree(); }
    }
    if (pick < 0) return true;
    for (auto& r : find_roots(ComplexPoly(P[pick]))) {
        bool all = true;
        for (int e = 0; e <= d && all; ++e) {
            ComplexPoly pe(P[e]);
            double sc = 0;
            for (int k = 0; k <= d; ++k) sc += std::abs(P[e][k]) * std::pow(std::abs(r.value), k);
            if (std::abs(pe(r.value)) > 1e-8 * std::max(sc, C.scale())) all = false;
        }
        if (all) {
            diag.push_back("contains isotropic line X1 = " + std::string(sign > 0 ? "" : "-") + "i*X0 + c*X2, c = " +
                           std::to_string(r.value.real()) + "+" + std::to_string(r.value.imag()) + "i");
            return true;
        }
    }
    return false;
}

} // namespace detail

inline GenericityReport genericity_report(const PlaneCurve& C)
{
    GenericityReport g;
    const int d = C.degree();
    auto& diag = g.diagnostics;

    // line at infinity as a component
    auto raw_inf = C.form().restrict_to_line({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    double sinf = 0;
    for (auto& a : raw_inf) sinf = std::max(sinf, std::abs(a));
    bool contains_inf = sinf <= 1e-14 * C.scale();
    if (contains_inf) diag.push_back("contains the line at infinity");

    g.irreducible_heuristic = !contains_inf;
    for (int s : {1, -1})
        if (detail::has_isotropic_line(C, s, diag)) g.irreducible_heuristic = false;

    // smoothness: affine critical points of F, then the points at infinity
    g.smooth = true;
    try {
        for (auto& s : solve_affine_system(C.partial(0), C.partial(1))) {
            ProjPoint p = ProjPoint::affine(s.x[0], s.x[1]);
            if (C.residual(p) < 1e-8) {
                g.smooth = false;
                diag.push_back("singular point " + detail::fmt_point(p));
            }
        }
    } catch (const Error& e) {
        g.smooth = false;
        diag.push_back(std::string("gradient system degenerate: ") + e.what());
    }

    std::vector<PointMult> inf;
    if (!contains_inf) inf = points_at_infinity(C);
    g.distinct_infinity_points = !contains_inf && int(inf.size()) == d;
    g.non_isotropic_infinity_tangents = !contains_inf;
    for (auto& pm : inf) {
        if (pm.multiplicity > 1) diag.push_back("repeated point at infinity " + detail::fmt_point(pm.point));
        Vec3 gr = C.gradient(pm.point.x);
        if (std::max({std::abs(gr[0]), std::abs(gr[1]), std::abs(gr[2])}) < 1e-8 * C.scale()) {
            g.smooth = false;
            diag.push_back("singular point at infinity " + detail::fmt_point(pm.point));
        }
        for (int s : {1, -1})
            if (direction_distance({pm.point[0], pm.point[1]}, {1.0, cplx(0, s)}) < 1e-6) {
                g.non_isotropic_infinity_tangents = false;
                diag.push_back("isotropic point at infinity " + detail::fmt_point(pm.point));
            }
    }

    g.simple_isotropic_tangencies = g.non_isotropic_infinity_tangents && g.irreducible_heuristic;
    if (g.simple_isotropic_tangencies) {
        for (int s : {1, -1}) {
            try {
                auto pts = isotropic_tangency_points(C, s);
                int total = 0;
                for (auto& pm : pts) {
                    total += pm.multiplicity;
                    if (pm.multiplicity > 1) {
                        g.simple_isotropic_tangencies = false;
                        diag.push_back("non-simple isotropic tangency " + detail::fmt_point(pm.point));
                    }
                }
                if (total != d * (d - 1)) {
                    g.simple_isotropic_tangencies = false;
                    diag.push_back("isotropic tangency count " + std::to_string(total) + " != d(d-1)");
                }
            } catch (const Error& e) {
                g.simple_isotropic_tangencies = false;
                diag.push_back(e.what());
            }
        }
    }
    return g;
}

} // namespace billiards

#endif
