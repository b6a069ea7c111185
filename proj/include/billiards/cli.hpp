#ifndef BILLIARDS_CLI_HPP
#define BILLIARDS_CLI_HPP

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "blowup.hpp"
#include "curve_io.hpp"
#include "spectral.hpp"
#include "symplectic.hpp"

namespace billiards::cli {

inline constexpr const char* kVersion = "1.0.0";

enum Exit { Ok = 0, InputError = 1, VerificationFailure = 2 };

struct RunConfig {
    std::string command;
    std::string curve_path;
    int d = 2;
    int depth = 5;
    int m_max = 20;
    int samples = 100;
    int scratch_index = -1;  // -1: all
    std::uint64_t seed = 1;
    bool real = false;
    std::string output_path;
    std::string format = "json";
    std::vector<double> eps;  // empty: default schedule
};

using nlohmann::json;

inline json config_json(const RunConfig& c)
{
    json j{{"command", c.command}, {"seed", c.seed}, {"format", c.format}};
    if (!c.curve_path.empty()) j["curve"] = c.curve_path;
    if (c.command == "spectral") {
        j["d"] = c.d;
        j["m_max"] = c.m_max;
    }
    if (c.command == "orbit") {
        j["depth"] = c.depth;
        j["real"] = c.real;
    }
    if (c.command == "form-check") j["samples"] = c.samples;
    if (c.command == "confine") {
        j["scratch_index"] = c.scratch_index;
        j["eps"] = c.eps.empty() ? default_eps() : c.eps;
    }
    if (!c.output_path.empty()) j["out"] = c.output_path;
    return j;
}

inline json meta_json(const RunConfig& c) { return {{"artifact", "billiards"}, {"version", kVersion}, {"config", config_json(c)}}; }

inline void csv_header(const RunConfig& c, std::ostream& os)
{
    os << "# artifact=billiards version=" << kVersion << "\n# config " << config_json(c).dump() << "\n";
}

// exact integers: JSON numbers up to 2^53, decimal strings beyond
inline json big_json(const BigInt& v)
{
    static const BigInt lim = BigInt(1) << 53;
    if (abs(v) <= lim) return v.convert_to<long long>();
    return v.str();
}

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline std::string csv_num(double v)
{
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

// ---------------------------------------------------------------- commands

inline int cmd_spectral(const RunConfig& c, std::ostream& out)
{
    if (c.d < 2) throw Error(ErrorKind::InvalidArgument, "d must be at least 2");
    namespace sp = spectral;
    auto fact = sp::verify_factorization(c.d);
    auto conj = sp::verify_conjugation(c.d);
    auto seq = sp::degree_sequence(c.d, c.m_max);
    auto ratios = sp::degree_ratios(seq);
    const int d = c.d;
    const bool ok = fact.verified && conj.verified();

    if (c.format == "csv") {
        csv_header(c, out);
        out << "# rho=" << csv_num(sp::rho(d)) << " char_poly_verified=" << fact.verified
            << " conjugation_verified=" << conj.verified() << "\n";
        out << "m,degree,ratio\n";
        for (std::size_t m = 0; m < seq.size(); ++m)
            out << m << "," << seq[m].str() << "," << (m + 1 < seq.size() ? csv_num(ratios[m]) : "") << "\n";
    } else {
        json j;
        j["meta"] = meta_json(c);
        j["d"] = d;
        json phi = json::array();
        const auto phi_d = sp::phi(d);
        for (auto& a : phi_d.coeffs()) phi.push_back(big_json(a));
        j["phi_coeffs"] = phi;
        j["rho"] = sp::rho(d);
        j["bracket"] = {2 * d * d - d - 5, 2 * d * d - d - 3};
        j["char_poly_verified"] = fact.verified;
        j["conjugation_verified"] = conj.verified();
        json ds = json::array();
        for (auto& v : seq) ds.push_back(big_json(v));
        j["degree_sequence"] = ds;
        j["ratios"] = ratios;
        out << j.dump(2) << "\n";
    }
    return ok ? Ok : VerificationFailure;
}

inline int cmd_orbit(const RunConfig& c, std::ostream& out)
{
    auto C = load_curve(c.curve_path);
    if (c.depth < 0) throw Error(ErrorKind::InvalidArgument, "depth must be non-negative");
    Sampler S(c.seed);
    std::ofstream dump;
    if (!c.output_path.empty()) {
        dump.open(c.output_path);
        if (!dump) throw Error(ErrorKind::InvalidArgument, "cannot write " + c.output_path);
    }
    json j;
    j["meta"] = meta_json(c);

    if (c.real) {
        auto x0 = S.real_phase_point(C);
        if (!x0) throw Error(ErrorKind::NoRealReturn, "no real starting point found on the curve");
        PhasePoint x = *x0;
        int steps = 0;
        std::string stop;
        if (dump && c.format == "csv") dump << "step,x0,x1,q0,q1\n";
        auto row = [&](int k, const PhasePoint& p) {
            if (!dump) return;
            auto a = p.c.affine_coords();
            double q0 = (p.q[0] / p.q[2]).real(), q1 = (p.q[1] / p.q[2]).real();
            if (c.format == "csv")
                dump << k << "," << csv_num(a[0].real()) << "," << csv_num(a[1].real()) << "," << csv_num(q0) << ","
                     << csv_num(q1) << "\n";
            else
                dump << json{{"step", k}, {"c", {a[0].real(), a[1].real()}}, {"q", {q0, q1}}}.dump() << "\n";
        };
        for (; steps < c.depth; ++steps) {
            try {
                x = real_billiard_step(C, x);
            } catch (const Error& e) {
                stop = e.what();
                break;
            }
            row(steps + 1, x);
        }
        j["mode"] = "real";
        j["steps"] = steps;
        if (!stop.empty()) j["stopped"] = stop;
    } else {
        auto x = S.phase_point(C);
        auto T = orbit_tree(C, x, c.depth);
        if (dump) write_orbit_jsonl(T, dump);
        j["mode"] = "complex";
        j["start"] = phase_json(x);
        json lv = json::array();
        for (std::size_t m = 0; m < T.levels.size(); ++m)
            lv.push_back({{"level", m}, {"nodes", T.levels[m].size()}, {"live_mass", T.live_mass(int(m))},
                          {"terminated_mass", T.terminated_mass(int(m))}});
        j["levels"] = lv;
        j["leaves"] = T.live_mass(c.depth) + T.terminated_mass(c.depth);
    }
    out << j.dump(2) << "\n";
    return Ok;
}

inline bool confinement_passes(const ConfinementReport& r)
{
    bool ok = r.cauchy && r.shrinking && r.min_pairwise_limit_distance > 1e-4;
    if (r.scratch.kind == ScratchKind::Infinity) ok = ok && r.max_prediction_error < 1e-5;
    return ok;
}

inline ConfinementReport run_confinement(const PlaneCurve& C, const ScratchPoint& s, std::uint64_t seed,
                                         const std::vector<double>& eps)
{
    if (s.kind == ScratchKind::Infinity) return confinement_experiment_infinity(C, s, infinity_starts(C, s, 3, seed), eps);
    return confinement_experiment_isotropic(C, s, isotropic_samples(C, s, 5, seed), eps);
}

inline int cmd_confine(const RunConfig& c, std::ostream& out)
{
    auto C = load_curve(c.curve_path);
    auto sc = enumerate_scratch_points(C);
    auto eps = c.eps.empty() ? default_eps() : c.eps;
    if (c.scratch_index >= int(sc.size())) throw Error(ErrorKind::InvalidArgument, "scratch index out of range");
    json reps = json::array();
    bool all = true;
    for (std::size_t i = 0; i < sc.size(); ++i) {
        if (c.scratch_index >= 0 && int(i) != c.scratch_index) continue;
        json rj;
        bool pass = false;
        try {
            auto r = run_confinement(C, sc[i], c.seed, eps);
            pass = confinement_passes(r);
            rj = report_json(r);
        } catch (const Error& e) {
            // a lost branch is a failed experiment, not bad input
            rj = {{"scratch", scratch_json(sc[i])}, {"error", e.what()}};
        }
        rj["index"] = i;
        rj["pass"] = pass;
        all = all && pass;
        reps.push_back(rj);
    }
    json j{{"meta", meta_json(c)}, {"reports", reps}, {"all_pass", all}};
    out << j.dump(2) << "\n";
    return all ? Ok : VerificationFailure;
}

struct FormCheckRow {
    int sample = 0;
    std::string op;
    int branch = 0;
    double h = 0;
    std::optional<InvarianceResult> result;
    std::string skipped;  // reason when result is empty
};

inline std::vector<FormCheckRow> form_check_rows(const PlaneCurve& C, const std::vector<PhasePoint>& xs, double h = 1e-4)
{
    std::vector<FormCheckRow> rows;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (OpTag op : {OpTag::Secant, OpTag::Reflect, OpTag::Billiard}) {
            int n = 1;
            try {
                n = int(detail::apply_op(C, xs[i], op).images.size());
            } catch (const Error&) {
            }
            for (int b = 0; b < n; ++b) {
                FormCheckRow r{int(i), to_string(op), b, h, std::nullopt, {}};
                try {
                    r.result = check_invariance(C, xs[i], op, b, h);
                } catch (const Error& e) {
                    r.skipped = e.what();
                }
                rows.push_back(r);
            }
        }
    }
    return rows;
}

inline int cmd_form_check(const RunConfig& c, std::ostream& out)
{
    auto C = load_curve(c.curve_path);
    auto g = genericity_report(C);
    if (!g.all()) throw Error(ErrorKind::GenericityFailure, "curve fails genericity");
    if (c.samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be positive");
    Sampler S(c.seed);
    std::vector<PhasePoint> xs;
    for (int i = 0; i < c.samples; ++i) xs.push_back(form_check_sample(C, S));
    auto rows = form_check_rows(C, xs);

    double worst = 0;
    int checked = 0;
    for (auto& r : rows)
        if (r.result) {
            worst = std::max(worst, r.result->residual_h);
            ++checked;
        }
    const bool ok = checked > 0 && worst < 1e-4;

    if (c.format == "json") {
        json arr = json::array();
        for (auto& r : rows) {
            json e{{"sample_id", r.sample}, {"op", r.op}, {"branch", r.branch}, {"h", r.h}};
            if (r.result) {
                e["residual_h"] = r.result->residual_h;
                e["residual_h2"] = r.result->residual_h2;
                e["order_estimate"] = r.result->order;
            } else {
                e["skipped"] = r.skipped;
            }
            arr.push_back(e);
        }
        out << json{{"meta", meta_json(c)}, {"rows", arr}, {"max_residual", worst}, {"pass", ok}}.dump(2) << "\n";
    } else {
        csv_header(c, out);
        out << "sample_id,op,branch,h,residual_h,residual_h2,order_estimate,skipped\n";
        for (auto& r : rows) {
            out << r.sample << "," << r.op << "," << r.branch << "," << csv_num(r.h) << ",";
            if (r.result)
                out << csv_num(r.result->residual_h) << "," << csv_num(r.result->residual_h2) << ","
                    << csv_num(r.result->order) << ",\n";
            else
                out << ",,,\"" << r.skipped << "\"\n";
        }
        out << "# max_residual=" << csv_num(worst) << " pass=" << ok << "\n";
    }
    return ok ? Ok : VerificationFailure;
}

inline int cmd_scratch(const RunConfig& c, std::ostream& out)
{
    auto C = load_curve(c.curve_path);
    auto g = genericity_report(C);
    std::vector<ScratchPoint> sc;
    if (g.all()) sc = enumerate_scratch_points(C);
    const int d = C.degree();
    const bool count_ok = !g.all() || int(sc.size()) == 2 * d * d;

    if (c.format == "csv") {
        csv_header(c, out);
        out << "index,kind,basic,c0_re,c0_im,c1_re,c1_im,c2_re,c2_im,q0_re,q0_im,q1_re,q1_im,q2_re,q2_im\n";
        for (std::size_t i = 0; i < sc.size(); ++i) {
            out << i << "," << to_string(sc[i].kind) << "," << sc[i].basic;
            for (auto& z : sc[i].phase.c.x) out << "," << csv_num(z.real()) << "," << csv_num(z.imag());
            for (auto& z : sc[i].phase.q.q) out << "," << csv_num(z.real()) << "," << csv_num(z.imag());
            out << "\n";
        }
    } else {
        json arr = json::array();
        for (std::size_t i = 0; i < sc.size(); ++i) {
            auto s = scratch_json(sc[i]);
            s["index"] = i;
            arr.push_back(s);
        }
        out << json{{"meta", meta_json(c)}, {"degree", d}, {"generic", g.all()}, {"count", sc.size()},
                    {"expected", 2 * d * d}, {"scratch_points", arr}}
                   .dump(2)
            << "\n";
    }
    return count_ok ? Ok : VerificationFailure;
}

inline int cmd_genericity(const RunConfig& c, std::ostream& out)
{
    auto C = load_curve(c.curve_path);
    auto g = genericity_report(C);
    json j{{"meta", meta_json(c)},
           {"irreducible_heuristic", g.irreducible_heuristic},
           {"smooth", g.smooth},
           {"distinct_infinity_points", g.distinct_infinity_points},
           {"non_isotropic_infinity_tangents", g.non_isotropic_infinity_tangents},
           {"simple_isotropic_tangencies", g.simple_isotropic_tangencies},
           {"all", g.all()},
           {"diagnostics", g.diagnostics}};
    out << j.dump(2) << "\n";
    return Ok;
}

// Runs one command. Output goes to out, or to config.output_path when set (orbit uses that path for
// the dump instead). Errors are reported on err.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    auto t0 = std::chrono::steady_clock::now();
    int code = Ok;
    try {
        if (c.format != "json" && c.format != "csv") throw Error(ErrorKind::InvalidArgument, "format must be json or csv");
        const bool curve_cmd = c.command != "spectral";
        if (curve_cmd && c.curve_path.empty()) throw Error(ErrorKind::InvalidArgument, "--curve is required");

        std::ofstream file;
        std::ostream* os = &out;
        if (!c.output_path.empty() && c.command != "orbit") {
            file.open(c.output_path);
            if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write " + c.output_path);
            os = &file;
        }
        if (c.command == "spectral") code = cmd_spectral(c, *os);
        else if (c.command == "orbit") code = cmd_orbit(c, *os);
        else if (c.command == "confine") code = cmd_confine(c, *os);
        else if (c.command == "form-check") code = cmd_form_check(c, *os);
        else if (c.command == "scratch") code = cmd_scratch(c, *os);
        else if (c.command == "genericity") code = cmd_genericity(c, *os);
        else throw Error(ErrorKind::InvalidArgument, "unknown command " + c.command);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        code = InputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = InputError;
    }
    // kept off the output so identical runs give identical files
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "wall_time_s=" << std::fixed << std::setprecision(3) << secs << "\n";
    return code;
}

} // namespace billiards::cli

#endif
