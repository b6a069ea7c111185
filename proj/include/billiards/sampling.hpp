#ifndef BILLIARDS_SAMPLING_HPP
#define BILLIARDS_SAMPLING_HPP

#include <cstdint>
#include <random>

#include "phase.hpp"

namespace billiards {

// std distributions are implementation-defined; map the raw engine output by hand so runs are
// reproducible across standard libraries
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    cplx complex_box(double r) { return {uniform(-r, r), uniform(-r, r)}; }
    std::size_t index(std::size_t n) { return std::size_t(uniform() * double(n)) % n; }

    // affine point of C: random x0, then a random root in x1
    ProjPoint curve_point(const PlaneCurve& C, double r = 1.5)
    {
        for (int attempt = 0; attempt < 100; ++attempt) {
            cplx x0 = complex_box(r);
            ComplexPoly p(C.form().restrict_to_line({x0, 0.0, 1.0}, {0.0, 1.0, 0.0}));
            if (p.degree() < 1) continue;
            auto roots = find_roots(p);
            auto x1 = roots[index(roots.size())].value;
            ProjPoint c = ProjPoint::affine(x0, x1);
            if (C.residual(c) < 1e-9) return c;
        }
        throw Error(ErrorKind::NonConvergence, "could not sample a curve point");
    }

    DirectionPoint direction()
    {
        Pair u{complex_box(1.0), complex_box(1.0)};
        return direction_from_slope(u, int(index(2)));
    }

    PhasePoint phase_point(const PlaneCurve& C, double r = 1.5) { return {curve_point(C, r), direction()}; }

    // real point on a real oval: intersect a ray from the origin with the curve
    std::optional<PhasePoint> real_phase_point(const PlaneCurve& C)
    {
        for (int attempt = 0; attempt < 100; ++attempt) {
            double th = uniform(0, 2 * M_PI);
            auto raw = C.form().restrict_to_line({0.0, 0.0, 1.0}, {std::cos(th), std::sin(th), 0.0});
            ComplexPoly p(raw);
            if (p.degree() < 1) continue;
            double best = -1;
            for (auto& rc : find_roots(p))
                if (std::abs(rc.value.imag()) < 1e-10 && rc.value.real() > 0 && rc.multiplicity == 1)
                    best = best < 0 ? rc.value.real() : std::min(best, rc.value.real());
            if (best < 0) continue;
            double phi = uniform(0, 2 * M_PI);
            ProjPoint c(best * std::cos(th), best * std::sin(th), 1.0);
            // aim inward: flip if the direction points away from the origin
            double q0 = std::cos(phi), q1 = std::sin(phi);
            if (q0 * std::cos(th) + q1 * std::sin(th) > 0) { q0 = -q0; q1 = -q1; }
            return PhasePoint{c, direction_from_real(q0, q1)};
        }
        return std::nullopt;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace billiards

#endif
