#ifndef BILLIARDS_BIGINT_HPP
#define BILLIARDS_BIGINT_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace billiards {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

class BigIntMatrix {
public:
    BigIntMatrix() = default;
    BigIntMatrix(int rows, int cols) : r_(rows), c_(cols), e_(std::size_t(rows) * cols) {}
    BigIntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
    {
        r_ = int(rows.size());
        c_ = r_ ? int(rows.begin()->size()) : 0;
        for (auto& row : rows) {
            if (int(row.size()) != c_) throw Error(ErrorKind::InvalidArgument, "ragged matrix");
            for (auto v : row) e_.emplace_back(v);
        }
    }
    static BigIntMatrix identity(int n)
    {
        BigIntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    BigInt& operator()(int i, int j) { return e_[std::size_t(i) * c_ + j]; }
    const BigInt& operator()(int i, int j) const { return e_[std::size_t(i) * c_ + j]; }
    const std::vector<BigInt>& entries() const { return e_; }

    BigIntMatrix transpose() const
    {
        BigIntMatrix t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    bool is_symmetric() const { return r_ == c_ && *this == transpose(); }

    friend bool operator==(const BigIntMatrix& a, const BigIntMatrix& b)
    {
        return a.r_ == b.r_ && a.c_ == b.c_ && a.e_ == b.e_;
    }
    friend BigIntMatrix operator*(const BigIntMatrix& a, const BigIntMatrix& b)
    {
        if (a.c_ != b.r_) throw Error(ErrorKind::InvalidArgument, "shape mismatch in product");
        BigIntMatrix p(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const BigInt& aik = a(i, k);
                if (aik == 0) continue;
                for (int j = 0; j < b.c_; ++j)
                    if (b(k, j) != 0) p(i, j) += aik * b(k, j);
            }
        return p;
    }
    friend BigIntMatrix operator-(const BigIntMatrix& a, const BigIntMatrix& b)
    {
        BigIntMatrix p = a;
        for (std::size_t i = 0; i < p.e_.size(); ++i) p.e_[i] -= b.e_[i];
        return p;
    }
    std::vector<BigInt> apply(const std::vector<BigInt>& v) const
    {
        std::vector<BigInt> out(r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j)
                if ((*this)(i, j) != 0 && v[j] != 0) out[i] += (*this)(i, j) * v[j];
        return out;
    }
    BigIntMatrix block(int i0, int j0, int nr, int nc) const
    {
        BigIntMatrix b(nr, nc);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
        return b;
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<BigInt> e_;
};

class IntPoly {
public:
    IntPoly() : c_{0} {}
    explicit IntPoly(std::vector<BigInt> c) : c_(std::move(c)) { trim(); }
    IntPoly(std::initializer_list<long long> il)
    {
        for (auto v : il) c_.emplace_back(v);
        trim();
    }

    int degree() const { return is_zero() ? -1 : int(c_.size()) - 1; }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0; }
    const std::vector<BigInt>& coeffs() const { return c_; }
    const BigInt& operator[](std::size_t k) const { return c_[k]; }
    const BigInt& leading() const { return c_.back(); }

    friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b)
    {
        std::vector<BigInt> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return IntPoly(std::move(r));
    }
    IntPoly pow(int k) const
    {
        IntPoly r{1};
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    // sign of p at the rational x
    int sign_at(const BigRat& x) const
    {
        BigRat v = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + BigRat(*it);
        return v > 0 ? 1 : (v < 0 ? -1 : 0);
    }
    long double eval(long double x) const
    {
        long double v = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + it->convert_to<long double>();
        return v;
    }
    IntPoly derivative() const
    {
        if (c_.size() <= 1) return IntPoly();
        std::vector<BigInt> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * BigInt(k);
        return IntPoly(std::move(d));
    }

    std::string to_string(const char* var = "x") const
    {
        std::string s;
        for (int k = int(c_.size()) - 1; k >= 0; --k) {
            if (c_[k] == 0 && !(k == 0 && s.empty())) continue;
            BigInt a = c_[k];
            if (!s.empty()) { s += a < 0 ? " - " : " + "; if (a < 0) a = -a; }
            if (a != 1 || k == 0) s += a.str();
            if (k >= 1) s += var;
            if (k >= 2) s += "^" + std::to_string(k);
        }
        return s;
    }

private:
    void trim()
    {
        if (c_.empty()) c_.push_back(0);
        while (c_.size() > 1 && c_.back() == 0) c_.pop_back();
    }
    std::vector<BigInt> c_;
};

struct DivisionResult {
    IntPoly quotient;
    IntPoly remainder;
    bool exact = false;
};

// Division over Q; exact means an integral quotient and zero remainder.
inline DivisionResult exact_poly_divide(const IntPoly& num, const IntPoly& den)
{
    if (den.is_zero()) throw Error(ErrorKind::InvalidArgument, "division by zero polynomial");
    std::vector<BigRat> r(num.coeffs().begin(), num.coeffs().end());
    int dn = den.degree();
    int nn = num.degree();
    std::vector<BigRat> q(std::max(nn - dn + 1, 1), BigRat(0));
    BigRat lead(den.leading());
    for (int k = nn - dn; k >= 0; --k) {
        BigRat f = r[k + dn] / lead;
        q[k] = f;
        if (f == 0) continue;
        for (int j = 0; j <= dn; ++j) r[k + j] -= f * BigRat(den[j]);
    }
    bool integral = true;
    std::vector<BigInt> qi, ri;
    for (auto& v : q) {
        if (denominator(v) != 1) integral = false;
        qi.push_back(numerator(v) / denominator(v));
    }
    bool zero_rem = true;
    for (int k = 0; k < std::min<int>(dn, int(r.size())); ++k) {
        if (denominator(r[k]) != 1) integral = false;
        if (r[k] != 0) zero_rem = false;
        ri.push_back(numerator(r[k]) / denominator(r[k]));
    }
    return {IntPoly(qi), IntPoly(ri), zero_rem && integral};
}

namespace detail {

inline bool is_prime_u32(std::uint64_t n)
{
    if (n < 2) return false;
    for (std::uint64_t f = 2; f * f <= n; ++f)
        if (n % f == 0) return false;
    return true;
}

inline const std::vector<std::uint64_t>& crt_primes(std::size_t count)
{
    static std::vector<std::uint64_t> ps;
    std::uint64_t n = ps.empty() ? (1ull << 31) - 1 : ps.back() - 2;
    while (ps.size() < count) {
        if (is_prime_u32(n)) ps.push_back(n);
        n -= 2;
    }
    return ps;
}

inline std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p)
{
    std::uint64_t r = 1;
    a %= p;
    while (e) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

// char poly over Z/p: Hessenberg reduction then the standard recurrence
inline std::vector<std::uint64_t> char_poly_mod(const BigIntMatrix& M, std::uint64_t p)
{
    const int n = M.rows();
    std::vector<std::uint64_t> H(std::size_t(n) * n);
    auto h = [&](int i, int j) -> std::uint64_t& { return H[std::size_t(i) * n + j]; };
    BigInt bp(p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            BigInt r = M(i, j) % bp;
            if (r < 0) r += bp;
            h(i, j) = r.convert_to<std::uint64_t>();
        }

    for (int j = 0; j + 2 < n; ++j) {
        int piv = -1;
        for (int i = j + 1; i < n; ++i)
            if (h(i, j)) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != j + 1) {
            for (int c = 0; c < n; ++c) std::swap(h(piv, c), h(j + 1, c));
            for (int r = 0; r < n; ++r) std::swap(h(r, piv), h(r, j + 1));
        }
        std::uint64_t inv = pow_mod(h(j + 1, j), p - 2, p);
        for (int k = j + 2; k < n; ++k) {
            if (!h(k, j)) continue;
            std::uint64_t u = h(k, j) * inv % p;
            std::uint64_t nu = p - u;
            for (int c = 0; c < n; ++c)
                if (h(j + 1, c)) h(k, c) = (h(k, c) + nu * h(j + 1, c)) % p;
            for (int r = 0; r < n; ++r)
                if (h(r, k)) h(r, j + 1) = (h(r, j + 1) + u * h(r, k)) % p;
        }
    }

    // P[m] is the char poly of the leading m x m block, ascending coefficients
    std::vector<std::vector<std::uint64_t>> P(n + 1);
    P[0] = {1};
    for (int m = 1; m <= n; ++m) {
        std::vector<std::uint64_t> cur(m + 1, 0);
        const auto& prev = P[m - 1];
        std::uint64_t hmm = h(m - 1, m - 1);
        for (int k = 0; k < m; ++k) {
            cur[k + 1] = (cur[k + 1] + prev[k]) % p;
            cur[k] = (cur[k] + (p - hmm) * prev[k]) % p;
        }
        std::uint64_t t = 1;
        for (int i = m - 1; i >= 1; --i) {
            t = t * h(i, i - 1) % p;
            if (!t) break;
            std::uint64_t coef = h(i - 1, m - 1) * t % p;
            if (!coef) continue;
            const auto& pi = P[i - 1];
            for (std::size_t k = 0; k < pi.size(); ++k)
                cur[k] = (cur[k] + (p - coef) * pi[k]) % p;
        }
        P[m] = std::move(cur);
    }
    return P[n];
}

} // namespace detail

// Exact det(lambda I - M). Multi-modular: Hessenberg mod 31-bit primes, CRT with a
// Hadamard-type coefficient bound prod(1 + |row_i|).
inline IntPoly char_poly(const BigIntMatrix& M)
{
    if (M.rows() != M.cols()) throw Error(ErrorKind::InvalidArgument, "char_poly needs a square matrix");
    if (M.rows() > 1000) throw Error(ErrorKind::InvalidArgument, "char_poly side > 1000");
    const int n = M.rows();
    if (n == 0) return IntPoly{1};

    double bits = 0;
    for (int i = 0; i < n; ++i) {
        BigInt s = 0;
        for (int j = 0; j < n; ++j) s += M(i, j) * M(i, j);
        double lg = s == 0 ? 0.0 : double(msb(s)) + 1;  // log2 of the squared norm, rounded up
        bits += 0.5 * lg + 1;                             // log2(1 + |row|) <= log2|row| + 1
    }
    bits += 2;  // sign and slack
    std::size_t np = std::size_t(std::ceil(bits / 30.0)) + 1;
    const auto& ps = detail::crt_primes(np);

    std::vector<BigInt> acc(n + 1, 0);
    BigInt mod = 1;
    for (std::size_t t = 0; t < np; ++t) {
        std::uint64_t p = ps[t];
        auto r = detail::char_poly_mod(M, p);
        BigInt bp(p);
        // inverse of mod modulo p
        std::uint64_t mm = BigInt(mod % bp).convert_to<std::uint64_t>();
        std::uint64_t inv = detail::pow_mod(mm, p - 2, p);
        for (int k = 0; k <= n; ++k) {
            std::uint64_t a = BigInt(acc[k] % bp).convert_to<std::uint64_t>();
            std::uint64_t diff = (r[k] + p - a) % p;
            std::uint64_t s = diff * inv % p;
            acc[k] += mod * s;
        }
        mod *= bp;
    }
    BigInt half = mod / 2;
    for (auto& a : acc)
        if (a > half) a -= mod;
    return IntPoly(acc);
}

// Rank over Q by fraction-free elimination.
inline int rank(BigIntMatrix A)
{
    int r = 0;
    BigInt prev = 1;
    const int R = A.rows(), C = A.cols();
    for (int c = 0; c < C && r < R; ++c) {
        int piv = -1;
        for (int i = r; i < R; ++i)
            if (A(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < C; ++j) std::swap(A(piv, j), A(r, j));
        for (int i = r + 1; i < R; ++i) {
            for (int j = c + 1; j < C; ++j)
                A(i, j) = (A(r, c) * A(i, j) - A(i, c) * A(r, j)) / prev;
            A(i, c) = 0;
        }
        prev = A(r, c);
        ++r;
    }
    return r;
}

inline BigIntMatrix matrix_power(const BigIntMatrix& M, int k)
{
    BigIntMatrix r = BigIntMatrix::identity(M.rows());
    for (int i = 0; i < k; ++i) r = r * M;
    return r;
}

// Largest (unique) root of p in (lo, hi). Exact-sign bisection, Newton finish.
inline double bracketed_largest_root(const IntPoly& p, double lo, double hi)
{
    if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "empty bracket");
    BigRat a(lo), b(hi);
    int sa = p.sign_at(a), sb = p.sign_at(b);
    if (sa * sb >= 0) throw Error(ErrorKind::NoSignChange, "p(lo)*p(hi) >= 0");

    // uniqueness check on 64 equispaced rational points
    int changes = 0, zeros = 0, last = sa;
    for (int k = 1; k <= 64; ++k) {
        BigRat x = a + (b - a) * BigRat(k, 64);
        int s = p.sign_at(x);
        if (s == 0) { ++zeros; continue; }
        if (s != last) ++changes;
        last = s;
    }
    if (changes != 1 || zeros > 1)
        throw Error(ErrorKind::NoSignChange, "root in bracket is not unique");

    BigRat tol(1, BigInt(1) << 46);
    while (b - a > tol) {
        BigRat m = (a + b) / 2;
        int sm = p.sign_at(m);
        if (sm == 0) return m.convert_to<double>();
        if (sm == sa) a = m; else b = m;
    }
    long double x = ((a + b) / 2).convert_to<long double>();
    long double la = a.convert_to<long double>(), lb = b.convert_to<long double>();
    IntPoly dp = p.derivative();
    for (int it = 0; it < 8; ++it) {
        long double d = dp.eval(x);
        if (d == 0) break;
        long double xn = x - p.eval(x) / d;
        if (xn < la || xn > lb) break;
        if (xn == x) break;
        x = xn;
    }
    return double(x);
}

// decimal string; plain number when it fits a double exactly
inline std::string big_to_string(const BigInt& v) { return v.str(); }

inline double ratio_to_double(const BigInt& num, const BigInt& den)
{
    if (den == 0) return std::nan("");
    BigInt n = abs(num), d = abs(den);
    long shift = 0;
    long bn = n == 0 ? 0 : long(msb(n)), bd = long(msb(d));
    if (bn > 900 || bd > 900) {
        shift = std::max(bn, bd) - 900;
        n >>= shift;
        d >>= shift;
    }
    double r = n.convert_to<double>() / d.convert_to<double>();
    return ((num < 0) != (den < 0)) ? -r : r;
}

} // namespace billiards

#endif
