#ifndef BILLIARDS_SPECTRAL_HPP
#define BILLIARDS_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bigint.hpp"

namespace billiards::spectral {

// Basis order: C0, D0, E_inf[2d], E_+i[d(d-1)], E_-i[d(d-1)].
struct DivisorBasis {
    int d;
    int size() const { return 2 * d * d + 2; }
    int inf_begin() const { return 2; }
    int inf_count() const { return 2 * d; }
    int iso_begin() const { return 2 + 2 * d; }
    int iso_count() const { return 2 * d * (d - 1); }  // both signs
    std::vector<std::string> labels() const
    {
        std::vector<std::string> l{"C0", "D0"};
        for (int j = 1; j <= 2 * d; ++j) l.push_back("E_inf_" + std::to_string(j));
        for (int j = 1; j <= d * (d - 1); ++j) l.push_back("E_+i_" + std::to_string(j));
        for (int j = 1; j <= d * (d - 1); ++j) l.push_back("E_-i_" + std::to_string(j));
        return l;
    }
};

enum class Tag { s_hat, r_hat, b_hat, s_cheap, r_cheap, b_cheap };

struct PushforwardMatrix {
    DivisorBasis basis;
    BigIntMatrix M;
    Tag tag;
};

inline void require_d(int d)
{
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "d must be >= 2");
}

inline BigIntMatrix intersection_form(int d)
{
    require_d(d);
    DivisorBasis B{d};
    BigIntMatrix J(B.size(), B.size());
    J(0, 1) = 1;
    J(1, 0) = 1;
    for (int i = 2; i < B.size(); ++i) J(i, i) = -1;
    return J;
}

struct CheapMatrices {
    BigIntMatrix Ms, Mr, Mb;
};

inline CheapMatrices cheap_matrices(int d)
{
    require_d(d);
    long long D = d;
    BigIntMatrix Ms{{D - 1, 2}, {0, D - 1}};
    BigIntMatrix Mr{{1, 0}, {D * (D - 1), 1}};
    return {Ms, Mr, Mr * Ms};
}

// eigenvalues of the cheap M_b: (d^2-1) +- sqrt(d^4 - 3d^2 + 2d)
inline double cheap_spectral_radius(int d)
{
    double dd = d;
    return dd * dd - 1 + std::sqrt(dd * dd * dd * dd - 3 * dd * dd + 2 * dd);
}

inline PushforwardMatrix pushforward_s_hat(int d)
{
    require_d(d);
    DivisorBasis B{d};
    BigIntMatrix M(B.size(), B.size());
    M(0, 0) = d - 1;
    M(0, 1) = 2;
    M(1, 1) = d - 1;
    for (int j = B.inf_begin(); j < B.iso_begin(); ++j) {
        M(0, j) = 1;   // s_* E_j ~ C0 - E_j
        M(j, j) = -1;
        M(j, 1) = -1;
    }
    for (int j = B.iso_begin(); j < B.size(); ++j) M(j, j) = 1;
    return {B, M, Tag::s_hat};
}

inline PushforwardMatrix pushforward_r_hat(int d)
{
    require_d(d);
    DivisorBasis B{d};
    BigIntMatrix M(B.size(), B.size());
    M(0, 0) = 1;
    M(1, 0) = d * (d - 1);
    M(1, 1) = 1;
    for (int j = B.inf_begin(); j < B.iso_begin(); ++j) M(j, j) = 1;
    for (int j = B.iso_begin(); j < B.size(); ++j) {
        M(1, j) = 1;   // r_* E_j ~ D0 - E_j
        M(j, j) = -1;
        M(j, 0) = -1;
    }
    return {B, M, Tag::r_hat};
}

// The product matrix written out block by block.
inline BigIntMatrix displayed_b_hat(int d)
{
    DivisorBasis B{d};
    BigIntMatrix M(B.size(), B.size());
    M(0, 0) = d - 1;
    M(0, 1) = 2;
    M(1, 0) = d * (d - 1) * (d - 1);
    M(1, 1) = (2 * d + 1) * (d - 1);
    for (int j = B.inf_begin(); j < B.iso_begin(); ++j) {
        M(0, j) = 1;
        M(1, j) = d * (d - 1);
        M(j, 1) = -1;
        M(j, j) = -1;
    }
    for (int j = B.iso_begin(); j < B.size(); ++j) {
        M(1, j) = 1;
        M(j, 0) = -(d - 1);
        M(j, 1) = -2;
        for (int k = B.inf_begin(); k < B.iso_begin(); ++k) M(j, k) = -1;
        M(j, j) = -1;
    }
    return M;
}

inline PushforwardMatrix pushforward_b_hat(int d)
{
    require_d(d);
    BigIntMatrix P = pushforward_r_hat(d).M * pushforward_s_hat(d).M;
    if (!(P == displayed_b_hat(d)))
        throw Error(ErrorKind::MatrixMismatch, "M_r * M_s differs from the block display at d=" + std::to_string(d));
    return {DivisorBasis{d}, P, Tag::b_hat};
}

inline IntPoly phi(int d)
{
    require_d(d);
    long long D = d;
    return IntPoly{-(D - 1), 2 * D * D - 4 * D + 3, -(2 * D * D - D - 3), 1};
}

struct FactorizationCertificate {
    bool verified = false;
    IntPoly char_poly;
    IntPoly product;
};

inline IntPoly expected_char_poly(int d)
{
    return phi(d) * IntPoly{1, 1}.pow(2 * d * d - 2) * IntPoly{-(long long)(d - 1), 1};
}

inline FactorizationCertificate verify_factorization(int d)
{
    FactorizationCertificate c;
    c.char_poly = char_poly(pushforward_b_hat(d).M);
    c.product = expected_char_poly(d);
    c.verified = c.char_poly == c.product;
    return c;
}

inline BigIntMatrix psi_matrix(int d)
{
    DivisorBasis B{d};
    BigIntMatrix P = BigIntMatrix::identity(B.size());
    auto block = [&](int b, int len) {
        for (int k = 1; k < len; ++k) {
            P(b, b + k) = 1;
            P(b + k, b + k) = -1;
        }
    };
    block(B.inf_begin(), B.inf_count());
    block(B.iso_begin(), B.iso_count());
    return P;
}

// Cycle (4 5 ... 2d+3) in 1-based positions; P(sigma(i), i) = 1.
inline BigIntMatrix pi_matrix(int d)
{
    DivisorBasis B{d};
    const int n = B.size();
    std::vector<int> sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = i;
    const int first = 3, last = 2 * d + 2;
    for (int i = first; i < last; ++i) sigma[i] = i + 1;
    sigma[last] = first;
    BigIntMatrix P(n, n);
    for (int i = 0; i < n; ++i) P(sigma[i], i) = 1;
    return P;
}

inline BigIntMatrix block_A(int d)
{
    long long D = d, e = D - 1;
    return BigIntMatrix{{e, 2, 1, 0},
                        {D * e * e, (2 * D + 1) * e, D * e, 1},
                        {0, -2 * D, -1, 0},
                        {-2 * D * e * e, -4 * D * e, -2 * D * e, -1}};
}

struct ConjugationCertificate {
    bool psi_involution = false;
    bool lower_right_minus_identity = false;
    bool upper_right_zero = false;
    bool upper_left_is_A = false;
    bool char_poly_A = false;
    BigIntMatrix upper_left;
    IntPoly chi_A;
    bool verified() const
    {
        return psi_involution && lower_right_minus_identity && upper_right_zero && upper_left_is_A && char_poly_A;
    }
};

inline ConjugationCertificate verify_conjugation(int d)
{
    require_d(d);
    ConjugationCertificate c;
    const int n = DivisorBasis{d}.size();
    BigIntMatrix Psi = psi_matrix(d), Pi = pi_matrix(d);
    BigIntMatrix I = BigIntMatrix::identity(n);
    c.psi_involution = Psi * Psi == I;
    BigIntMatrix T = Pi * Psi * pushforward_b_hat(d).M * Psi * Pi.transpose();
    c.lower_right_minus_identity = true;
    c.upper_right_zero = true;
    for (int i = 4; i < n; ++i)
        for (int j = 4; j < n; ++j)
            if (T(i, j) != (i == j ? -1 : 0)) c.lower_right_minus_identity = false;
    for (int i = 0; i < 4; ++i)
        for (int j = 4; j < n; ++j)
            if (T(i, j) != 0) c.upper_right_zero = false;
    c.upper_left = T.block(0, 0, 4, 4);
    c.upper_left_is_A = c.upper_left == block_A(d);
    c.chi_A = char_poly(block_A(d));
    c.char_poly_A = c.chi_A == IntPoly{-(long long)(d - 1), 1} * phi(d);
    return c;
}

inline double rho(int d)
{
    require_d(d);
    if (d == 2) return 1.0;
    double lo = 2.0 * d * d - d - 5, hi = 2.0 * d * d - d - 3;
    return bracketed_largest_root(phi(d), lo, hi);
}

struct NumericRadius {
    double value = 0;
    bool polynomial_growth = false;
    double growth_exponent = 0;  // only meaningful when polynomial_growth
};

// Power iteration on M_b in long double.
inline NumericRadius numeric_spectral_radius(int d, int max_iter = 4000)
{
    const auto M = pushforward_b_hat(d).M;
    const int n = M.rows();
    std::vector<long double> A(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[std::size_t(i) * n + j] = M(i, j).convert_to<long double>();
    std::vector<long double> v(n, 0), w(n);
    v[0] = v[1] = 1;
    long double logn = 0, lam = 0, prev = -1;
    long double log_at_half = 0;
    int half = max_iter / 2;
    for (int it = 1; it <= max_iter; ++it) {
        long double nn = 0;
        for (int i = 0; i < n; ++i) {
            long double s = 0;
            for (int j = 0; j < n; ++j) s += A[std::size_t(i) * n + j] * v[j];
            w[i] = s;
            nn += s * s;
        }
        nn = std::sqrt(nn);
        lam = nn;
        logn += std::log(nn);
        for (int i = 0; i < n; ++i) v[i] = w[i] / nn;
        if (it == half) log_at_half = logn;
        if (d > 2 && it > 20 && std::fabs(lam - prev) <= 1e-15L * lam) break;
        prev = lam;
    }
    NumericRadius r;
    r.value = double(lam);
    if (d == 2) {
        // |M^m v| ~ m^k: compare log growth between m and m/2
        r.growth_exponent = double((logn - log_at_half) / std::log(2.0L));
        r.polynomial_growth = std::fabs(lam - 1) < 1e-2L && r.growth_exponent < 3.5;
    }
    return r;
}

// d_m = (M^m Delta)^T J Delta with Delta = C0 + D0.
inline std::vector<BigInt> degree_sequence(int d, int m_max)
{
    require_d(d);
    if (m_max < 0 || m_max > 200) throw Error(ErrorKind::InvalidArgument, "m_max must be in 0..200");
    const auto M = pushforward_b_hat(d).M;
    const auto J = intersection_form(d);
    std::vector<BigInt> delta(M.rows(), 0);
    delta[0] = delta[1] = 1;
    std::vector<BigInt> Jd = J.apply(delta);
    std::vector<BigInt> v = delta, out;
    for (int m = 0; m <= m_max; ++m) {
        BigInt s = 0;
        for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * Jd[i];
        out.push_back(s);
        if (m < m_max) v = M.apply(v);
    }
    return out;
}

inline std::vector<double> degree_ratios(const std::vector<BigInt>& seq)
{
    std::vector<double> r;
    for (std::size_t m = 0; m + 1 < seq.size(); ++m) r.push_back(ratio_to_double(seq[m + 1], seq[m]));
    return r;
}

struct JordanData {
    std::vector<int> nullities_plus;   // (M - I)^k, k = 1..4
    std::vector<int> nullities_minus;  // (M + I)^k
    std::vector<int> block_sizes;      // descending
};

inline std::vector<int> blocks_from_nullities(const std::vector<int>& nul)
{
    // blocks of size >= k number nul[k-1] - nul[k-2]
    std::vector<int> ge(nul.size() + 1, 0);
    for (std::size_t k = 0; k < nul.size(); ++k) ge[k] = nul[k] - (k ? nul[k - 1] : 0);
    std::vector<int> sizes;
    for (std::size_t k = 0; k < nul.size(); ++k) {
        int exactly = ge[k] - ge[k + 1];
        for (int t = 0; t < exactly; ++t) sizes.push_back(int(k) + 1);
    }
    return sizes;
}

inline JordanData jordan_structure_d2(int max_power = 4)
{
    const auto M = pushforward_b_hat(2).M;
    const int n = M.rows();
    JordanData jd;
    for (int sgn : {1, -1}) {
        BigIntMatrix N = M;
        for (int i = 0; i < n; ++i) N(i, i) -= sgn;
        BigIntMatrix P = BigIntMatrix::identity(n);
        std::vector<int>& nul = sgn == 1 ? jd.nullities_plus : jd.nullities_minus;
        for (int k = 1; k <= max_power; ++k) {
            P = P * N;
            nul.push_back(n - rank(P));
        }
        for (int b : blocks_from_nullities(nul)) jd.block_sizes.push_back(b);
    }
    std::sort(jd.block_sizes.rbegin(), jd.block_sizes.rend());
    return jd;
}

// lambda_0 = lambda_2 = d - 1
inline int topological_degree(int d) { return d - 1; }

} // namespace billiards::spectral

#endif
