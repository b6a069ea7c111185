#ifndef BILLIARDS_POLY_HPP
#define BILLIARDS_POLY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "error.hpp"

namespace billiards {

using cplx = std::complex<double>;

class ComplexPoly {
public:
    static constexpr double lead_zero_tol = 1e-12;

    ComplexPoly() : c_{cplx(0)} {}
    explicit ComplexPoly(std::vector<cplx> coeffs) : c_(std::move(coeffs))
    {
        if (c_.empty()) c_.push_back(0.0);
        trim();
    }
    ComplexPoly(std::initializer_list<cplx> il) : ComplexPoly(std::vector<cplx>(il)) {}

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx operator[](std::size_t k) const { return k < c_.size() ? c_[k] : cplx(0); }
    cplx leading() const { return c_.back(); }

    double scale() const
    {
        double m = 0;
        for (auto& a : c_) m = std::max(m, std::abs(a));
        return m;
    }
    bool is_zero() const { return c_.size() == 1 && c_[0] == cplx(0); }

    cplx operator()(cplx z) const
    {
        cplx r = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * z + *it;
        return r;
    }

    // value, derivative and running error bound for |p(z)|
    void eval3(cplx z, cplx& p, cplx& dp, double& eb) const
    {
        p = 0; dp = 0; eb = 0;
        double az = std::abs(z);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            dp = dp * z + p;
            p = p * z + *it;
            eb = eb * az + std::abs(*it);
        }
    }

    ComplexPoly derivative() const
    {
        if (c_.size() <= 1) return ComplexPoly();
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * double(k);
        return ComplexPoly(std::move(d));
    }

    friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b)
    {
        std::vector<cplx> r(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return ComplexPoly(std::move(r));
    }
    friend ComplexPoly operator+(const ComplexPoly& a, const ComplexPoly& b)
    {
        std::vector<cplx> r(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
        return ComplexPoly(std::move(r));
    }

private:
    void trim()
    {
        double m = scale();
        while (c_.size() > 1 && std::abs(c_.back()) <= lead_zero_tol * m) c_.pop_back();
        if (c_.size() == 1 && m == 0) c_[0] = 0.0;
    }
    std::vector<cplx> c_;
};

struct RootCluster {
    cplx value;
    int multiplicity = 1;
    double residual = 0;
};

namespace detail {

inline double binom(int n, int k)
{
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// j-th Taylor coefficient at z and its rounding bound
inline void taylor_coeff(const std::vector<cplx>& a, int j, cplx z, cplx& b, double& e)
{
    b = 0; e = 0;
    double az = std::abs(z);
    for (int k = int(a.size()) - 1; k >= j; --k) {
        double w = binom(k, j);
        b = b * z + w * a[k];
        e = e * az + w * std::abs(a[k]);
    }
}

inline bool looks_multiple(const std::vector<cplx>& a, cplx z, int m)
{
    constexpr double u = std::numeric_limits<double>::epsilon();
    for (int j = 0; j < m; ++j) {
        cplx b; double e;
        taylor_coeff(a, j, z, b, e);
        if (std::abs(b) > 2e4 * u * (e + 1e-300) * (j + 1)) return false;
    }
    return true;
}

inline std::vector<cplx> aberth(const ComplexPoly& p)
{
    const int n = p.degree();
    const auto& a = p.coeffs();
    constexpr double u = std::numeric_limits<double>::epsilon();
    std::vector<cplx> z(n);

    // initial radius from the geometric mean of |a0/an|, widened by a Fujiwara-style bound
    double r0 = std::pow(std::abs(a[0] / a[n]), 1.0 / n);
    double fb = 0;
    for (int k = 0; k < n; ++k)
        fb = std::max(fb, std::pow(std::abs(a[k] / a[n]), 1.0 / (n - k)));
    double rad = (r0 > 0 && std::isfinite(r0)) ? std::min(r0, 2 * fb) : fb;
    if (!(rad > 0)) rad = 1;
    for (int k = 0; k < n; ++k)
        z[k] = std::polar(rad, 2 * M_PI * k / n + 0.4);

    std::vector<char> done(n, 0);
    for (int sweep = 0; sweep < 500; ++sweep) {
        bool all = true;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            cplx v, dv; double eb;
            p.eval3(z[i], v, dv, eb);
            if (std::abs(v) <= 8 * u * eb) { done[i] = 1; continue; }
            cplx s = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            cplx den = dv - v * s;
            cplx w = den == cplx(0) ? cplx(1e-8 * (1 + std::abs(z[i]))) : v / den;
            z[i] -= w;
            if (std::abs(w) <= 2 * u * std::abs(z[i])) done[i] = 1;
            else all = false;
        }
        if (all && std::all_of(done.begin(), done.end(), [](char c) { return c; })) return z;
    }
    for (int i = 0; i < n; ++i) {
        if (done[i]) continue;
        cplx v, dv; double eb;
        p.eval3(z[i], v, dv, eb);
        if (std::abs(v) > 1e3 * u * eb)
            throw Error(ErrorKind::NonConvergence, "Aberth iteration did not converge in 500 sweeps");
    }
    return z;
}

} // namespace detail

inline double cluster_residual(const ComplexPoly& p, cplx z)
{
    return std::abs(p(z)) / std::max(1.0, std::abs(p.leading()));
}

// All roots of p grouped into clusters; multiplicities sum to deg p.
inline std::vector<RootCluster> find_roots(const ComplexPoly& p)
{
    if (p.degree() < 1) throw Error(ErrorKind::InvalidArgument, "find_roots needs degree >= 1");
    for (auto& a : p.coeffs())
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");

    std::vector<RootCluster> out;
    // exact zero roots first
    const auto& a = p.coeffs();
    int z0 = 0;
    while (a[z0] == cplx(0)) ++z0;
    if (z0) out.push_back({0.0, z0, 0.0});
    if (z0 == p.degree()) return out;

    ComplexPoly q(std::vector<cplx>(a.begin() + z0, a.end()));
    std::vector<cplx> z = q.degree() == 1
        ? std::vector<cplx>{-q[0] / q[1]}
        : detail::aberth(q);

    // Newton polish, keeping a step only if it helps
    for (auto& r : z) {
        for (int it = 0; it < 4; ++it) {
            cplx v, dv; double eb;
            q.eval3(r, v, dv, eb);
            if (dv == cplx(0)) break;
            cplx rn = r - v / dv;
            if (std::abs(q(rn)) < std::abs(v)) r = rn; else break;
        }
    }

    double zmax = 0;
    for (auto& r : z) zmax = std::max(zmax, std::abs(r));
    const int n = static_cast<int>(z.size());

    auto link = [&](double tol) {
        std::vector<int> lab(n);
        std::iota(lab.begin(), lab.end(), 0);
        std::function<int(int)> find = [&](int i) { return lab[i] == i ? i : lab[i] = find(lab[i]); };
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::abs(z[i] - z[j]) < tol) lab[find(i)] = find(j);
        std::vector<std::vector<int>> groups;
        std::vector<int> gid(n, -1);
        for (int i = 0; i < n; ++i) {
            int r = find(i);
            if (gid[r] < 0) { gid[r] = int(groups.size()); groups.emplace_back(); }
            groups[gid[r]].push_back(i);
        }
        return groups;
    };
    auto centroid = [&](const std::vector<int>& g) {
        cplx s = 0;
        for (int i : g) s += z[i];
        return s / double(g.size());
    };

    // refine a group centre: the (m-1)th derivative has a simple root at a true m-fold root
    auto refine = [&](cplx c, int m) {
        if (m < 2) return c;
        ComplexPoly dm = q;
        for (int k = 0; k < m - 1; ++k) dm = dm.derivative();
        ComplexPoly dm1 = dm.derivative();
        cplx c0 = c;
        for (int it = 0; it < 6; ++it) {
            cplx v = dm(c), dv = dm1(c);
            if (dv == cplx(0)) break;
            cplx cn = c - v / dv;
            if (std::abs(cn - c0) > 1e-2 * (1 + std::abs(c0))) break;
            if (std::abs(dm(cn)) < std::abs(v)) c = cn; else break;
        }
        return c;
    };

    // primary clusters at the stated threshold
    auto primary = link(1e-6 * (1 + zmax));
    // a split multiple root can spread to eps^(1/m); wider groups are accepted only if the
    // refined centre passes a numerical multiplicity test
    auto wide = link(1e-2 * (1 + zmax));
    std::vector<std::pair<cplx, int>> groups;
    std::vector<char> taken(n, 0);
    for (auto& g : wide) {
        if (g.size() < 2) continue;
        int m = int(g.size());
        cplx c = refine(centroid(g), m);
        if (detail::looks_multiple(q.coeffs(), c, m)) {
            groups.emplace_back(c, m);
            for (int i : g) taken[i] = 1;
        }
    }
    for (auto& g : primary)
        if (!taken[g[0]]) groups.emplace_back(refine(centroid(g), int(g.size())), int(g.size()));

    for (auto& [c, m] : groups) out.push_back({c, m, 0.0});
    for (auto& r : out) r.residual = cluster_residual(p, r.value);
    std::sort(out.begin(), out.end(), [](const RootCluster& x, const RootCluster& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
    return out;
}

// Synthetic division by (t - r), k times.
inline ComplexPoly deflate_root(const ComplexPoly& p, cplx r, int k = 1)
{
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "deflate_root needs k >= 1");
    std::vector<cplx> c = p.coeffs();
    for (int pass = 0; pass < k; ++pass) {
        if (c.size() < 2) throw Error(ErrorKind::InvalidArgument, "cannot deflate a constant");
        ComplexPoly cur(c);
        double res = std::abs(cur(r)) / std::max(1.0, cur.scale());
        if (res > 1e-6) throw Error(ErrorKind::NotARoot, "residual " + std::to_string(res));
        std::size_t n = c.size() - 1;
        std::vector<cplx> qt(n);
        cplx acc = 0;
        for (std::size_t i = n; i-- > 0;) {
            acc = acc * r + c[i + 1];
            qt[i] = acc;
        }
        c = std::move(qt);
    }
    return ComplexPoly(std::move(c));
}

inline std::vector<cplx> expand_roots(const std::vector<RootCluster>& rc)
{
    std::vector<cplx> v;
    for (auto& r : rc)
        for (int k = 0; k < r.multiplicity; ++k) v.push_back(r.value);
    return v;
}

} // namespace billiards

#endif
