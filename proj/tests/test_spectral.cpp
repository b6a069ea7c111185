#include <gtest/gtest.h>

#include <billiards/spectral.hpp>

#include "oracles.hpp"

using namespace billiards;
using namespace billiards::spectral;

namespace {

std::vector<BigInt> mul(const std::vector<BigInt>& a, const std::vector<BigInt>& b)
{
    std::vector<BigInt> r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

std::vector<BigInt> factored(int d)
{
    BigInt D = d;
    std::vector<BigInt> phi{-(D - 1), 2 * D * D - 4 * D + 3, -(2 * D * D - D - 3), 1};
    std::vector<BigInt> r = phi;
    for (int k = 0; k < 2 * d * d - 2; ++k) r = mul(r, {1, 1});
    return mul(r, {-(D - 1), 1});
}

oracle::Mat to_mat(const BigIntMatrix& M)
{
    oracle::Mat A(M.rows(), std::vector<oracle::cpp_int>(M.cols()));
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) A[i][j] = M(i, j);
    return A;
}

} // namespace

TEST(IntersectionForm, Involution)
{
    for (int d = 2; d <= 12; ++d) {
        auto J = intersection_form(d);
        EXPECT_EQ(J * J, BigIntMatrix::identity(2 * d * d + 2));
    }
    auto J = intersection_form(2);
    EXPECT_EQ(J(0, 1), 1);
    EXPECT_EQ(J(0, 0), 0);
    for (int i = 2; i < 10; ++i) EXPECT_EQ(J(i, i), -1);
}

TEST(Cheap, Matrices)
{
    auto c = cheap_matrices(2);
    EXPECT_EQ(c.Ms, (BigIntMatrix{{1, 2}, {0, 1}}));
    EXPECT_EQ(c.Mr, (BigIntMatrix{{1, 0}, {2, 1}}));
    EXPECT_EQ(c.Mb, (BigIntMatrix{{1, 2}, {2, 5}}));
    for (int d = 2; d <= 12; ++d) {
        auto m = cheap_matrices(d).Mb;
        EXPECT_EQ(m(0, 0) + m(1, 1), 2 * d * d - 2);
        EXPECT_EQ(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0), (d - 1) * (d - 1));
        double tr = (m(0, 0) + m(1, 1)).convert_to<double>();
        double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).convert_to<double>();
        double rad = (tr + std::sqrt(tr * tr - 4 * det)) / 2;
        EXPECT_NEAR(cheap_spectral_radius(d), rad, 1e-9 * rad);
        EXPECT_LT(rad, 2.0 * d * d);
    }
    EXPECT_NEAR(cheap_spectral_radius(2), 3 + 2 * std::sqrt(2.0), 1e-12);
}

TEST(Pushforward, ColumnExamples)
{
    auto s = pushforward_s_hat(2).M;
    std::vector<int> col{1, 0, -1, 0, 0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 10; ++i) EXPECT_EQ(s(i, 2), col[i]);
    auto r = pushforward_r_hat(2).M;
    std::vector<int> colr{0, 1, 0, 0, 0, 0, -1, 0, 0, 0};
    for (int i = 0; i < 10; ++i) EXPECT_EQ(r(i, 6), colr[i]);
    EXPECT_EQ(r.block(0, 0, 2, 2), (BigIntMatrix{{1, 0}, {2, 1}}));
    auto s3 = pushforward_s_hat(3).M;
    EXPECT_EQ(s3.block(8, 8, 12, 12), BigIntMatrix::identity(12));
}

TEST(Pushforward, SelfAdjoint)
{
    for (int d = 2; d <= 12; ++d) {
        auto J = intersection_form(d);
        EXPECT_TRUE((J * pushforward_s_hat(d).M).is_symmetric()) << d;
        EXPECT_TRUE((J * pushforward_r_hat(d).M).is_symmetric()) << d;
    }
}

TEST(Pushforward, ProductMatchesDisplay)
{
    for (int d = 2; d <= 12; ++d) {
        auto b = pushforward_b_hat(d).M;
        EXPECT_EQ(b, displayed_b_hat(d));
    }
    EXPECT_EQ(pushforward_b_hat(2).M(1, 0), 2);
    EXPECT_EQ(pushforward_b_hat(3).M(1, 1), 14);
    auto b3 = pushforward_b_hat(3).M;
    for (int j = 8; j < 20; ++j) {
        EXPECT_EQ(b3(j, 0), -2);
        EXPECT_EQ(b3(j, 1), -2);
    }
}

TEST(Phi, Coefficients)
{
    EXPECT_EQ(phi(2), (IntPoly{-1, 3, -3, 1}));
    EXPECT_EQ(phi(3), (IntPoly{-2, 9, -12, 1}));
    EXPECT_EQ(phi(4), (IntPoly{-3, 19, -25, 1}));
    EXPECT_EQ(phi(2), IntPoly({-1, 1}).pow(3));
}

TEST(Factorization, D2AgainstFaddeevLeVerrier)
{
    auto M = pushforward_b_hat(2).M;
    IntPoly fl(oracle::faddeev_leverrier(to_mat(M)));
    IntPoly want = IntPoly{1, 1}.pow(6) * IntPoly{-1, 1}.pow(4);
    EXPECT_EQ(fl, want);
    EXPECT_EQ(char_poly(M), want);
    auto div = exact_poly_divide(char_poly(M), IntPoly{1, 1}.pow(6));
    EXPECT_TRUE(div.exact);
    EXPECT_EQ(div.quotient, IntPoly({-1, 1}).pow(4));
}

TEST(Factorization, D3AgainstFaddeevLeVerrier)
{
    auto M = pushforward_b_hat(3).M;
    IntPoly fl(oracle::faddeev_leverrier(to_mat(M)));
    EXPECT_EQ(fl, IntPoly(factored(3)));
    EXPECT_EQ(char_poly(M), IntPoly(factored(3)));
}

TEST(Factorization, D2ToD8)
{
    for (int d = 2; d <= 8; ++d) {
        auto c = verify_factorization(d);
        EXPECT_TRUE(c.verified) << d;
        EXPECT_EQ(c.char_poly, IntPoly(factored(d))) << d;
        EXPECT_EQ(c.char_poly.degree(), 2 * d * d + 2);
    }
}

TEST(Conjugation, Certificates)
{
    auto c2 = verify_conjugation(2);
    EXPECT_TRUE(c2.verified());
    EXPECT_EQ(c2.upper_left, (BigIntMatrix{{1, 2, 1, 0}, {2, 5, 2, 1}, {0, -4, -1, 0}, {-4, -8, -4, -1}}));
    EXPECT_EQ(c2.chi_A, IntPoly({-1, 1}).pow(4));
    auto c3 = verify_conjugation(3);
    EXPECT_TRUE(c3.verified());
    EXPECT_EQ(c3.chi_A, (IntPoly{-2, 1} * IntPoly{-2, 9, -12, 1}));
    auto P = psi_matrix(5);
    EXPECT_EQ(P * P, BigIntMatrix::identity(52));
    // A's characteristic polynomial by an independent method
    for (int d = 2; d <= 6; ++d)
        EXPECT_EQ(IntPoly(oracle::faddeev_leverrier(to_mat(block_A(d)))), IntPoly({-(long long)(d - 1), 1}) * phi(d));
}

TEST(Rho, Values)
{
    EXPECT_EQ(rho(2), 1.0);
    double r3 = rho(3);
    EXPECT_GT(r3, 11.21);
    EXPECT_LT(r3, 11.22);
    for (int d = 3; d <= 12; ++d) {
        double r = rho(d);
        EXPECT_GT(r, 2.0 * d * d - d - 5);
        EXPECT_LT(r, 2.0 * d * d - d - 3);
        double D = d;
        auto f = [&](double x) { return ((x - (2 * D * D - D - 3)) * x + (2 * D * D - 4 * D + 3)) * x - (D - 1); };
        EXPECT_NEAR(r, oracle::bisect(f, 2 * D * D - D - 5, 2 * D * D - D - 3), 1e-12 * r);
        EXPECT_LT(std::fabs(double(phi(d).eval(r))), 1e-10 * std::fabs(double(phi(d).derivative().eval(r))));
    }
}

TEST(Rho, PowerIterationAgrees)
{
    for (int d = 3; d <= 12; ++d) {
        auto nr = numeric_spectral_radius(d);
        EXPECT_NEAR(nr.value, rho(d), 1e-8 * rho(d)) << d;
    }
    auto n2 = numeric_spectral_radius(2);
    EXPECT_TRUE(n2.polynomial_growth);
    EXPECT_NEAR(n2.growth_exponent, 2.0, 0.05);
}

TEST(DegreeSequence, D2IsQuadratic)
{
    auto s = degree_sequence(2, 200);
    for (int m = 0; m <= 200; ++m) EXPECT_EQ(s[m], BigInt(8) * m * m + 2);
    for (int m = 0; m + 2 <= 200; ++m) EXPECT_EQ(s[m + 2] - 2 * s[m + 1] + s[m], 16);
}

TEST(DegreeSequence, D3RatiosConverge)
{
    auto s = degree_sequence(3, 60);
    EXPECT_EQ(s[0], 2);
    std::vector<int> head{2, 30, 382, 4354, 48942};
    for (std::size_t k = 0; k < head.size(); ++k) EXPECT_EQ(s[k], head[k]);
    auto r = degree_ratios(s);
    EXPECT_NEAR(r[59], rho(3), 1e-6 * rho(3));
}

TEST(DegreeSequence, BadArgs)
{
    EXPECT_THROW(degree_sequence(1, 3), Error);
    EXPECT_THROW(degree_sequence(2, 201), Error);
}

TEST(Jordan, D2)
{
    auto j = jordan_structure_d2();
    EXPECT_EQ(j.nullities_plus, (std::vector<int>{2, 3, 4, 4}));
    EXPECT_EQ(j.nullities_minus, (std::vector<int>{6, 6, 6, 6}));
    EXPECT_EQ(j.block_sizes, (std::vector<int>{3, 1, 1, 1, 1, 1, 1, 1}));
}
