#include <gtest/gtest.h>

#include <billiards/blowup.hpp>
#include <billiards/curve_io.hpp>

using namespace billiards;

namespace {

const cplx I(0, 1);
const double S3 = std::sqrt(3.0), S5 = std::sqrt(5.0);

PlaneCurve ellipse() { return PlaneCurve::from_real(2, {{2, 0, 0, 1, 1}, {0, 2, 0, 4, 1}, {0, 0, 2, -4, 1}}); }
PlaneCurve data_curve(const std::string& name) { return load_curve(std::string(BILLIARDS_DATA_DIR) + "/curves/" + name + ".json"); }

// the ellipse scratch point over [2 : i : 0] with q = (2/sqrt3, i/sqrt3, 1)
ScratchPoint ellipse_scratch()
{
    auto C = ellipse();
    ProjPoint c(2.0, I, 0.0);
    DirectionPoint q(Vec3{2 / S3, I / S3, 1.0});
    for (auto& s : enumerate_scratch_points(C))
        if (s.kind == ScratchKind::Infinity && proj_distance(s.phase.c, c) < 1e-12 &&
            proj_distance(s.phase.q.as_point(), q.as_point()) < 1e-12)
            return s;
    throw std::runtime_error("scratch point not found");
}

int count_kind(const std::vector<ScratchPoint>& v, ScratchKind k)
{
    return int(std::count_if(v.begin(), v.end(), [&](const ScratchPoint& s) { return s.kind == k; }));
}

} // namespace

TEST(Scratch, Census)
{
    struct Case { PlaneCurve C; int inf, iso; };
    for (auto& [C, inf, iso] : std::vector<Case>{{ellipse(), 4, 2}, {data_curve("cubic"), 6, 6}, {data_curve("quartic"), 8, 12}}) {
        auto sc = enumerate_scratch_points(C);
        int d = C.degree();
        EXPECT_EQ(int(sc.size()), 2 * d * d);
        EXPECT_EQ(count_kind(sc, ScratchKind::Infinity), inf);
        EXPECT_EQ(count_kind(sc, ScratchKind::IsotropicPlus), iso);
        EXPECT_EQ(count_kind(sc, ScratchKind::IsotropicMinus), iso);
        for (auto& s : sc) {
            EXPECT_TRUE(s.basic);
            EXPECT_LT(direction_distance(s.phase.q.slope(), s.t), 1e-8);
            if (s.kind == ScratchKind::Infinity)
                EXPECT_LT(std::abs(s.phase.c[2]), 1e-8);
            else
                EXPECT_TRUE(s.phase.q.is_isotropic());
        }
    }
}

TEST(Scratch, CircleFailsGenericity)
{
    auto circle = data_curve("circle");
    try {
        enumerate_scratch_points(circle);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GenericityFailure);
    }
}

TEST(InfinityLimit, EllipseExamples)
{
    auto C = ellipse();
    auto s = ellipse_scratch();
    // unit-norm chart: kappa = (i x0 - 2 x1) / sqrt5
    EXPECT_LT(std::abs(kappa(s, {0.0, -1.0}) - 2 / S5), 1e-12);

    auto b = secant_at_infinity_limit(C, {s, 2 / S5});
    ASSERT_EQ(b.images.size(), 1u);
    EXPECT_LT(proj_distance(b.images[0].x.c, ProjPoint::affine(0.0, -1.0)), 1e-10);
    EXPECT_LT(proj_distance(b.images[0].x.q.as_point(), s.phase.q.as_point()), 1e-12);

    auto b2 = secant_at_infinity_limit(C, {s, -2 / S5});
    EXPECT_LT(proj_distance(b2.images[0].x.c, ProjPoint::affine(0.0, 1.0)), 1e-10);
}

TEST(InfinityLimit, EllipseOracle)
{
    auto C = ellipse();
    auto s = ellipse_scratch();
    Sampler S(5);
    for (int i = 0; i < 50; ++i) {
        cplx v = S.complex_box(3.0);
        cplx k = v * S5;  // in units of i x0 - 2 x1
        auto b = secant_at_infinity_limit(C, {s, v});
        ASSERT_EQ(b.images.size(), 1u);
        auto x = b.images[0].x.c.affine_coords();
        EXPECT_LT(std::abs(x[1] + (1.0 + k * k / 4.0) / k), 1e-9 * (1 + std::abs(x[1])));
    }
}

TEST(InfinityLimit, ResidualAndLevelSet)
{
    Sampler S(9);
    for (auto name : {"cubic", "quartic"}) {
        auto C = data_curve(name);
        for (auto& s : enumerate_scratch_points(C)) {
            if (s.kind != ScratchKind::Infinity) continue;
            for (int i = 0; i < 5; ++i) {
                cplx v = S.complex_box(2.0);
                auto b = secant_at_infinity_limit(C, {s, v});
                EXPECT_EQ(b.total_multiplicity(), C.degree() - 1);
                for (auto& im : b.images) {
                    EXPECT_LT(C.residual(im.x.c), 1e-7);
                    EXPECT_LT(std::abs(kappa(s, im.x.c.affine_coords()) - v), 1e-7);
                }
            }
        }
    }
}

TEST(InfinityLimit, BoundaryPoints)
{
    auto C = ellipse();
    auto s = ellipse_scratch();
    for (ExceptionalParam e : {ExceptionalParam{s, 0.0}, ExceptionalParam{s, 1.0, true}}) {
        try {
            secant_at_infinity_limit(C, e);
            FAIL();
        } catch (const Error& err) {
            EXPECT_EQ(err.kind(), ErrorKind::BoundaryPoint);
        }
    }
}

TEST(InfinityLimit, ReflectNegates)
{
    auto C = ellipse();
    auto s = ellipse_scratch();
    EXPECT_EQ(reflect_at_infinity_limit(C, {s, 1.0}).value, cplx(-1.0));
    EXPECT_EQ(reflect_at_infinity_limit(C, {s, 0.0}).value, cplx(0.0));
    EXPECT_EQ(reflect_at_infinity_limit(C, {s, cplx(2, 1)}).value, cplx(-2, -1));
    Sampler S(2);
    for (int i = 0; i < 20; ++i) {
        ExceptionalParam e{s, S.complex_box(5.0)};
        EXPECT_EQ(reflect_at_infinity_limit(C, reflect_at_infinity_limit(C, e)).value, e.value);
    }
}

TEST(IsotropicLimit, SecantNegatesAndStatic)
{
    for (auto [name, stat] : std::vector<std::pair<std::string, int>>{{"ellipse", 0}, {"cubic", 1}, {"quartic", 2}}) {
        auto C = name == "ellipse" ? ellipse() : data_curve(name);
        for (auto& s : enumerate_scratch_points(C)) {
            if (s.kind == ScratchKind::Infinity) continue;
            auto [img, st] = secant_at_isotropic_limit(C, {s, cplx(0.3, -0.7)});
            EXPECT_EQ(img.value, cplx(-0.3, 0.7));
            EXPECT_EQ(st.total_multiplicity(), stat) << name;
            for (auto& im : st.images) {
                EXPECT_LT(C.residual(im.x.c), 1e-7);
                EXPECT_GT(proj_distance(im.x.c, s.phase.c), 1e-6);
            }
        }
    }
}

TEST(IsotropicLimit, InjectiveAndOnFiber)
{
    for (auto C : {ellipse(), data_curve("cubic")}) {
        for (auto& s : enumerate_scratch_points(C)) {
            if (s.kind == ScratchKind::Infinity) continue;
            auto a = reflect_at_isotropic_limit(C, {s, 0.7});
            auto b = reflect_at_isotropic_limit(C, {s, cplx(-0.3, 0.4)});
            EXPECT_LT(proj_distance(a.c, s.phase.c), 1e-12);
            EXPECT_LT(a.q.conic_residual(), 1e-6);
            EXPECT_GT(proj_distance(a.q.as_point(), b.q.as_point()), 1e-6);
        }
    }
}

TEST(IsotropicLimit, ConjugateSymmetry)
{
    auto C = data_curve("cubic");
    auto sc = enumerate_scratch_points(C);
    auto conj3 = [](const Vec3& v) { return Vec3{std::conj(v[0]), std::conj(v[1]), std::conj(v[2])}; };
    int checked = 0;
    for (auto& s : sc) {
        if (s.kind != ScratchKind::IsotropicPlus) continue;
        ProjPoint cc(conj3(s.phase.c.x));
        for (auto& t : sc) {
            if (t.kind != ScratchKind::IsotropicMinus || proj_distance(t.phase.c, cc) > 1e-9) continue;
            cplx v(0.4, 0.2);
            auto a = reflect_at_isotropic_limit(C, {s, v});
            auto b = reflect_at_isotropic_limit(C, {t, std::conj(v)});
            EXPECT_LT(proj_distance(ProjPoint(conj3(a.q.q)), b.q.as_point()), 1e-6);
            ++checked;
        }
    }
    EXPECT_EQ(checked, 6);
}

TEST(Richardson, FirstOrderSequence)
{
    std::vector<std::vector<cplx>> L;
    for (double e : default_eps()) L.push_back({1.0 + 3.0 * e + e * e, cplx(0, 2) - e});
    auto ex = richardson(L);
    EXPECT_TRUE(ex.cauchy);
    EXPECT_TRUE(ex.shrinking);
    EXPECT_LT(std::abs(ex.limit[0] - 1.0), 1e-8);
    EXPECT_LT(std::abs(ex.limit[1] - cplx(0, 2)), 1e-12);

    std::vector<std::vector<cplx>> osc;
    for (int k = 0; k < 13; ++k) osc.push_back({cplx(k % 2)});
    auto bad = richardson(osc);
    EXPECT_FALSE(bad.cauchy);
    EXPECT_FALSE(bad.shrinking);
}

TEST(Confinement, EllipseInfinity)
{
    auto C = ellipse();
    auto s = ellipse_scratch();
    auto r = confinement_experiment_infinity(C, s, {ProjPoint::affine(0.0, -1.0), ProjPoint::affine(0.0, 1.0)});
    ASSERT_EQ(r.limits.size(), 2u);
    DirectionPoint qf(Vec3{2 / S3, -I / S3, 1.0});
    PhasePoint e0{ProjPoint::affine(0.0, 1.0), qf}, e1{ProjPoint::affine(0.0, -1.0), qf};
    EXPECT_LT(phase_distance(r.limits[0][0], e0), 1e-5);
    EXPECT_LT(phase_distance(r.limits[1][0], e1), 1e-5);
    EXPECT_LT(r.max_prediction_error, 1e-5);
    EXPECT_GT(r.min_pairwise_limit_distance, 1e-3);
    EXPECT_TRUE(r.cauchy);
    EXPECT_TRUE(r.shrinking);
}

TEST(Confinement, StartAtInfinityRejected)
{
    auto C = ellipse();
    auto s = ellipse_scratch();
    try {
        confinement_experiment_infinity(C, s, {s.phase.c});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

TEST(Confinement, CubicAllScratchPoints)
{
    auto C = data_curve("cubic");
    auto sc = enumerate_scratch_points(C);
    ASSERT_EQ(sc.size(), 18u);
    for (auto& s : sc) {
        ConfinementReport r = s.kind == ScratchKind::Infinity
                                  ? confinement_experiment_infinity(C, s, infinity_starts(C, s, 3, 1))
                                  : confinement_experiment_isotropic(C, s, isotropic_samples(C, s, 5, 1));
        EXPECT_TRUE(r.cauchy) << to_string(s.kind);
        EXPECT_TRUE(r.shrinking) << to_string(s.kind);
        EXPECT_GT(r.min_pairwise_limit_distance, 1e-4);
        if (s.kind == ScratchKind::Infinity) EXPECT_LT(r.max_prediction_error, 1e-5);
    }
}

TEST(Confinement, CoincidentSamples)
{
    auto C = data_curve("cubic");
    for (auto& s : enumerate_scratch_points(C)) {
        if (s.kind != ScratchKind::IsotropicPlus) continue;
        auto smp = isotropic_samples(C, s, 1, 4);
        smp.push_back(smp[0]);
        auto r = confinement_experiment_isotropic(C, s, smp);
        EXPECT_LT(r.min_pairwise_limit_distance, 1e-12);
        break;
    }
}

TEST(Confinement, EllipseIsotropicVaries)
{
    auto C = ellipse();
    for (auto& s : enumerate_scratch_points(C)) {
        if (s.kind == ScratchKind::Infinity) continue;
        auto r = confinement_experiment_isotropic(C, s, isotropic_samples(C, s, 4, 3));
        EXPECT_TRUE(r.cauchy);
        EXPECT_GT(r.min_pairwise_limit_distance, 1e-4);
    }
}

TEST(Confinement, ReportJson)
{
    auto C = ellipse();
    auto s = ellipse_scratch();
    auto j = report_json(confinement_experiment_infinity(C, s, {ProjPoint::affine(0.0, -1.0)}));
    for (auto key : {"scratch", "samples", "eps", "limits", "predicted", "max_prediction_error", "min_pairwise_limit_distance"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["eps"].size(), 13u);
}
