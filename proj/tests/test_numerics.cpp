#include <random>

#include <gtest/gtest.h>

#include <billiards/bigint.hpp>
#include <billiards/poly.hpp>

#include "oracles.hpp"

using namespace billiards;

namespace {

void expect_roots(const std::vector<RootCluster>& got, std::vector<std::pair<cplx, int>> want, double tol = 1e-9)
{
    int total = 0;
    for (auto& g : got) total += g.multiplicity;
    int wtotal = 0;
    for (auto& w : want) wtotal += w.second;
    ASSERT_EQ(total, wtotal);
    ASSERT_EQ(got.size(), want.size());
    for (auto& w : want) {
        bool hit = false;
        for (auto& g : got)
            if (std::abs(g.value - w.first) < tol * (1 + std::abs(w.first)) && g.multiplicity == w.second) hit = true;
        EXPECT_TRUE(hit) << "missing root " << w.first << " x" << w.second;
    }
}

} // namespace

TEST(FindRoots, SimplePair)
{
    expect_roots(find_roots(ComplexPoly{-1, 0, 1}), {{1.0, 1}, {-1.0, 1}});
}

TEST(FindRoots, TripleRoot)
{
    expect_roots(find_roots(ComplexPoly{-8, 12, -6, 1}), {{2.0, 3}}, 1e-7);
}

TEST(FindRoots, Phi3LargestRootMatchesBisection)
{
    auto r = find_roots(ComplexPoly{-2, 9, -12, 1});
    double best = -1e9;
    for (auto& c : r)
        if (std::abs(c.value.imag()) < 1e-9) best = std::max(best, c.value.real());
    EXPECT_GT(best, 11.21);
    EXPECT_LT(best, 11.22);
    double bis = oracle::bisect([](double x) { return ((x - 12) * x + 9) * x - 2; }, 11.2, 11.3);
    EXPECT_NEAR(best, bis, 1e-12);
}

TEST(FindRoots, KnownFactorizations)
{
    std::vector<std::vector<std::pair<cplx, int>>> cases = {
        {{cplx(1, 1), 2}, {cplx(-0.5, 0.25), 1}, {cplx(3, 0), 1}},
        {{cplx(0, 1), 1}, {cplx(0, -1), 1}, {cplx(0.1, 0), 1}, {cplx(0.1001, 0), 1}},
        {{cplx(-1, 0), 6}, {cplx(1, 0), 4}},
        {{cplx(0, 0), 2}, {cplx(2, -1), 1}},
        {{cplx(1e3, 0), 1}, {cplx(1e-3, 0), 1}, {cplx(-5, 2), 2}},
    };
    for (auto& cs : cases) {
        std::vector<cplx> roots;
        for (auto& [z, m] : cs)
            for (int k = 0; k < m; ++k) roots.push_back(z);
        auto got = find_roots(ComplexPoly(oracle::from_roots(roots)));
        expect_roots(got, cs, 1e-5);
        double zmax = 0;
        for (auto& z : roots) zmax = std::max(zmax, std::abs(z));
        ComplexPoly p(oracle::from_roots(roots));
        for (auto& g : got) {
            if (zmax <= 10) {
                EXPECT_LE(g.residual, 1e-8) << g.value << " x" << g.multiplicity;
            } else {
                // absolute residual is evaluation noise here; check it against the Horner bound
                cplx v, dv; double eb;
                p.eval3(g.value, v, dv, eb);
                EXPECT_LE(std::abs(v), 1e3 * 2.2e-16 * eb) << g.value;
            }
        }
    }
}

TEST(FindRoots, RandomSimpleRootsRecovered)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 2 + trial % 12;
        std::vector<cplx> roots;
        for (int k = 0; k < n; ++k) roots.emplace_back(U(rng), U(rng));
        auto got = find_roots(ComplexPoly(oracle::from_roots(roots)));
        int total = 0;
        for (auto& g : got) total += g.multiplicity;
        ASSERT_EQ(total, n);
        for (auto z : roots) {
            double best = 1e9;
            for (auto& g : got) best = std::min(best, std::abs(g.value - z));
            EXPECT_LT(best, 1e-6);
        }
    }
}

TEST(FindRoots, RejectsConstant)
{
    EXPECT_THROW(find_roots(ComplexPoly{3}), Error);
}

TEST(DeflateRoot, Examples)
{
    auto q = deflate_root(ComplexPoly{-1, 0, 1}, 1.0, 1);
    ASSERT_EQ(q.degree(), 1);
    EXPECT_NEAR(std::abs(q[0] - 1.0), 0, 1e-15);
    EXPECT_NEAR(std::abs(q[1] - 1.0), 0, 1e-15);

    auto t = deflate_root(ComplexPoly{0, 0, 0, 1}, 0.0, 2);
    ASSERT_EQ(t.degree(), 1);
    EXPECT_EQ(t[0], cplx(0));
    EXPECT_EQ(t[1], cplx(1));
}

TEST(DeflateRoot, EllipseSecantPolynomial)
{
    // (2 - t/sqrt2, t/sqrt2) substituted into x^2/4 + y^2 - 1
    const double s = std::sqrt(2.0);
    auto f = [&](double t) { double x = 2 - t / s, y = t / s; return x * x / 4 + y * y - 1; };
    // quadratic through three samples
    double c0 = f(0), c1 = (f(1) - f(-1)) / 2, c2 = (f(1) + f(-1)) / 2 - c0;
    EXPECT_NEAR(c1, -s / 2, 1e-14);
    EXPECT_NEAR(c2, 5.0 / 8, 1e-14);
    auto q = deflate_root(ComplexPoly{c0, c1, c2}, 0.0, 1);
    ASSERT_EQ(q.degree(), 1);
    EXPECT_NEAR((-q[0] / q[1]).real(), 4 * s / 5, 1e-14);
}

TEST(DeflateRoot, NotARoot)
{
    try {
        deflate_root(ComplexPoly{-1, 0, 1}, 2.0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotARoot);
    }
}

TEST(DeflateRoot, MultiplyBackReproduces)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> roots;
        for (int k = 0; k < 6; ++k) roots.emplace_back(U(rng), U(rng));
        ComplexPoly p(oracle::from_roots(roots));
        auto q = deflate_root(p, roots[0], 1);
        auto back = q * ComplexPoly{-roots[0], 1};
        for (int k = 0; k <= p.degree(); ++k)
            EXPECT_LT(std::abs(back[k] - p[k]), 1e-9 * p.scale());
    }
}

TEST(CharPoly, Identity2)
{
    EXPECT_EQ(char_poly(BigIntMatrix::identity(2)), (IntPoly{1, -2, 1}));
}

TEST(CharPoly, MatchesFaddeevLeVerrierOnRandomMatrices)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> U(-9, 9);
    for (int trial = 0; trial < 12; ++trial) {
        int n = 1 + trial % 8;
        BigIntMatrix M(n, n);
        oracle::Mat A(n, std::vector<oracle::cpp_int>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                int v = U(rng) * (trial % 3 == 0 ? 12345 : 1);
                M(i, j) = v;
                A[i][j] = v;
            }
        EXPECT_EQ(char_poly(M), IntPoly(oracle::faddeev_leverrier(A)));
    }
}

TEST(CharPoly, ConstantTermIsSignedDeterminant)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> U(-20, 20);
    for (int trial = 0; trial < 10; ++trial) {
        BigIntMatrix M(5, 5);
        oracle::Mat A(5, std::vector<oracle::cpp_int>(5));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) M(i, j) = A[i][j] = U(rng);
        BigInt det = oracle::cofactor_det(A);
        EXPECT_EQ(char_poly(M)[0], -det);  // (-1)^5 det
    }
}

TEST(CharPoly, SingularAndNilpotent)
{
    BigIntMatrix N{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
    EXPECT_EQ(char_poly(N), (IntPoly{0, 0, 0, 1}));
    BigIntMatrix Z(4, 4);
    EXPECT_EQ(char_poly(Z), (IntPoly{0, 0, 0, 0, 1}));
}

TEST(ExactDivide, Examples)
{
    auto r = exact_poly_divide(IntPoly{-1, 0, 1}, IntPoly{-1, 1});
    EXPECT_TRUE(r.exact);
    EXPECT_EQ(r.quotient, (IntPoly{1, 1}));
    IntPoly l1{-1, 1};
    auto r2 = exact_poly_divide(l1.pow(3), l1);
    EXPECT_TRUE(r2.exact);
    EXPECT_EQ(r2.quotient, l1.pow(2));
    auto r3 = exact_poly_divide(IntPoly{1, 0, 1}, IntPoly{-1, 1});
    EXPECT_FALSE(r3.exact);
    EXPECT_EQ(r3.remainder, IntPoly{2});
}

TEST(BracketedRoot, Phi2IsExactlyOne)
{
    EXPECT_EQ(bracketed_largest_root(IntPoly{-1, 3, -3, 1}, 0.5, 1.5), 1.0);
}

TEST(BracketedRoot, Phi3AgainstBisection)
{
    IntPoly p{-2, 9, -12, 1};
    double r = bracketed_largest_root(p, 10, 12);
    double bis = oracle::bisect([](double x) { return ((x - 12) * x + 9) * x - 2; }, 10, 12);
    EXPECT_NEAR(r, bis, 1e-12);
    EXPECT_GT(r, 11.2132);
    EXPECT_LT(r, 11.2133);
    long double v = p.eval(r), dv = p.derivative().eval(r);
    EXPECT_LT(std::fabs(double(v / dv)), 1e-10);
}

TEST(BracketedRoot, Phi4InInterval)
{
    double r = bracketed_largest_root(IntPoly{-3, 19, -25, 1}, 23, 25);
    EXPECT_GT(r, 23);
    EXPECT_LT(r, 25);
}

TEST(BracketedRoot, NoSignChange)
{
    try {
        bracketed_largest_root(IntPoly{-2, 9, -12, 1}, 0, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoSignChange);
    }
}

TEST(Rank, SmallCases)
{
    EXPECT_EQ(rank(BigIntMatrix{{1, 2}, {2, 4}}), 1);
    EXPECT_EQ(rank(BigIntMatrix{{1, 2}, {3, 4}}), 2);
    EXPECT_EQ(rank(BigIntMatrix(3, 3)), 0);
    EXPECT_EQ(rank(BigIntMatrix{{0, 1, 2}, {0, 2, 4}, {1, 0, 0}}), 2);
}
