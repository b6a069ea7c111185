#ifndef BILLIARDS_CURVE_IO_HPP
#define BILLIARDS_CURVE_IO_HPP

#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "curve.hpp"

namespace billiards {

inline BigRat parse_rational(const std::string& s)
{
    static const std::regex re(R"(\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw Error(ErrorKind::ParseError, "bad rational '" + s + "'");
    BigInt num(m[1].str().front() == '+' ? m[1].str().substr(1) : m[1].str());
    BigInt den = m[2].matched ? BigInt(m[2].str()) : BigInt(1);
    if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
    return BigRat(num, den);
}

inline std::string rational_string(const BigRat& r)
{
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

inline PlaneCurve curve_from_json(const nlohmann::json& j)
{
    using nlohmann::json;
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "curve must be a JSON object");
    for (auto& [k, v] : j.items())
        if (k != "degree" && k != "coeffs") throw Error(ErrorKind::ParseError, "unknown field '" + k + "'");
    if (!j.contains("degree") || !j["degree"].is_number_integer())
        throw Error(ErrorKind::ParseError, "missing integer 'degree'");
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw Error(ErrorKind::ParseError, "missing 'coeffs' array");
    int d = j["degree"].get<int>();
    std::map<PlaneCurve::Key, GaussRat> m;
    for (auto& c : j["coeffs"]) {
        if (!c.is_object()) throw Error(ErrorKind::ParseError, "coefficient entry must be an object");
        for (auto& [k, v] : c.items())
            if (k != "i" && k != "j" && k != "k" && k != "re" && k != "im")
                throw Error(ErrorKind::ParseError, "unknown coefficient field '" + k + "'");
        for (const char* e : {"i", "j", "k"})
            if (!c.contains(e) || !c[e].is_number_integer())
                throw Error(ErrorKind::ParseError, std::string("missing integer exponent '") + e + "'");
        auto rat = [&](const char* key) -> BigRat {
            if (!c.contains(key)) return 0;
            if (!c[key].is_string()) throw Error(ErrorKind::ParseError, std::string("'") + key + "' must be a string");
            return parse_rational(c[key].get<std::string>());
        };
        PlaneCurve::Key key{c["i"].get<int>(), c["j"].get<int>(), c["k"].get<int>()};
        if (m.count(key)) throw Error(ErrorKind::ParseError, "duplicate monomial");
        m[key] = GaussRat{rat("re"), rat("im")};
    }
    try {
        return PlaneCurve(d, m);
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

inline nlohmann::json curve_to_json(const PlaneCurve& C)
{
    nlohmann::json j;
    j["degree"] = C.degree();
    j["coeffs"] = nlohmann::json::array();
    for (auto& [e, c] : C.exact_coeffs()) {
        if (c.is_zero()) continue;
        auto [i, jj, k] = e;
        nlohmann::json t{{"i", i}, {"j", jj}, {"k", k}, {"re", rational_string(c.re)}};
        if (c.im != 0) t["im"] = rational_string(c.im);
        j["coeffs"].push_back(t);
    }
    return j;
}

inline PlaneCurve load_curve(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
    }
    return curve_from_json(j);
}

inline PlaneCurve parse_curve(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
    }
    return curve_from_json(j);
}

} // namespace billiards

#endif
