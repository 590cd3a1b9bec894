#include "rslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "rslab/errors.hpp"

namespace rslab::config {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

const std::vector<std::string>& all_check_names() {
    static const std::vector<std::string> names = {
        "prop3_factorization", "sklyanin_analytic", "sklyanin_fd",
        "dynamical_quadratic", "skew_conditions", "lemma1", "tg_identity",
        "linear_cm", "involution", "hamiltonian_involution",
        "poisson_map_symplectic", "vandermonde", "cm_limit_slope", "cybe",
        "qybe", "r_antisymmetry", "zn_symmetry_r", "zn_symmetry_R",
        "classical_limit", "corollary1_s_vanish", "corollary1_h_invariance",
        "corollary1_h_matches_r"};
    return names;
}

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> tol = {
        {"prop3_factorization", 1e-9},
        {"sklyanin_analytic", 1e-9},
        {"sklyanin_fd", 1e-6},
        {"dynamical_quadratic", 1e-8},
        {"skew_conditions", 1e-10},
        {"lemma1", 1e-9},
        {"tg_identity", 1e-9},
        {"linear_cm", 1e-8},
        {"involution", 1e-7},
        {"hamiltonian_involution", 1e-7},
        {"poisson_map_symplectic", 1e-9},
        {"vandermonde", 1e-10},
        {"cm_limit_slope", 0.1},
        {"cybe", 1e-10},
        {"qybe", 1e-10},
        {"r_antisymmetry", 1e-12},
        {"zn_symmetry_r", 1e-12},
        {"zn_symmetry_R", 1e-12},
        {"classical_limit", 0.1},
        {"corollary1_s_vanish", 1e-6},
        {"corollary1_h_invariance", 1e-10},
        {"corollary1_h_matches_r", 1e-6},
    };
    return tol;
}

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.checks = all_check_names();
    c.tolerances = default_tolerances();
    return c;
}

cplx parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw ParseError("empty complex literal");

    auto parse_real = [](const std::string& t) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            throw ParseError("not a number: '" + t + "'");
        }
        if (used != t.size()) throw ParseError("trailing characters in number '" + t + "'");
        return v;
    };
    // forms: a | bi | i | -i | a+bi | a-bi
    if (s.back() == 'i') {
        std::string body = s.substr(0, s.size() - 1);
        for (size_t k = body.size(); k-- > 1;) {
            if ((body[k] == '+' || body[k] == '-') &&
                body[k - 1] != 'e' && body[k - 1] != 'E') {
                double re = parse_real(body.substr(0, k));
                std::string im = body.substr(k);
                if (im == "+") return cplx(re, 1.0);
                if (im == "-") return cplx(re, -1.0);
                return cplx(re, parse_real(im));
            }
        }
        if (body.empty() || body == "+") return cplx(0.0, 1.0);
        if (body == "-") return cplx(0.0, -1.0);
        return cplx(0.0, parse_real(body));
    }
    return cplx(parse_real(s), 0.0);
}

std::string format_complex(cplx z) {
    std::string out = fmt_full(z.real());
    if (z.imag() >= 0.0 || std::isnan(z.imag())) out += "+";
    out += fmt_full(z.imag());
    out += "i";
    return out;
}

namespace {

void validate(const ScenarioConfig& c) {
    auto check_n = [](int n) {
        if (n < 2 || n > 8)
            throw ValidationError("n = " + std::to_string(n) +
                                  " outside the allowed range [2,8]");
    };
    check_n(c.n);
    for (int n : c.suite_n) check_n(n);
    if (!(c.tau.imag() > 0.0))
        throw ValidationError("tau violates the modulus requirement Im(tau) > 0");
    if (c.series.max_terms <= 0 || c.series.tail_tol <= 0.0)
        throw ValidationError("series control requires positive max_terms and tail_tol");
    const auto& known = all_check_names();
    for (const auto& name : c.checks)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ValidationError("unknown check name '" + name + "'");
    for (const auto& [name, tol] : c.tolerances) {
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw ValidationError("tolerance for unknown check '" + name + "'");
        if (tol < 0.0) throw ValidationError("negative tolerance for '" + name + "'");
    }
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c = default_config();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "n") {
                c.n = std::stoi(val);
            } else if (key == "suite_n") {
                c.suite_n.clear();
                for (const auto& t : split(val, ',')) c.suite_n.push_back(std::stoi(t));
            } else if (key == "tau") {
                c.tau = parse_complex(val);
            } else if (key == "gamma") {
                c.gamma = parse_complex(val);
            } else if (key == "hbar") {
                c.hbar = std::stod(val);
            } else if (key == "mc2") {
                c.mc2 = std::stod(val);
            } else if (key == "cm_s") {
                c.cm_s = std::stod(val);
            } else if (key == "spectral_points") {
                c.spectral_points.clear();
                for (const auto& pair_text : split(val, ';')) {
                    auto uv = split(pair_text, ',');
                    if (uv.size() != 2)
                        throw ParseError("spectral pair '" + pair_text + "' is not 'u,v'");
                    c.spectral_points.emplace_back(parse_complex(uv[0]),
                                                   parse_complex(uv[1]));
                }
            } else if (key == "seeds") {
                c.seeds.clear();
                for (const auto& t : split(val, ',')) c.seeds.push_back(std::stoull(t));
            } else if (key == "checks") {
                c.checks = split(val, ',');
            } else if (key == "tolerances") {
                for (const auto& t : split(val, ',')) {
                    auto colon = t.find(':');
                    if (colon == std::string::npos)
                        throw ParseError("tolerance entry '" + t + "' is not 'check:value'");
                    c.tolerances[trim(t.substr(0, colon))] = std::stod(t.substr(colon + 1));
                }
            } else if (key == "series.max_terms") {
                c.series.max_terms = std::stoi(val);
            } else if (key == "series.tail_tol") {
                c.series.tail_tol = std::stod(val);
            } else if (key == "s12_variant") {
                if (val == "auto") c.s12_variant = S12Mode::auto_select;
                else if (val == "a") c.s12_variant = S12Mode::a;
                else if (val == "b") c.s12_variant = S12Mode::b;
                else if (val == "c") c.s12_variant = S12Mode::c;
                else throw ParseError("s12_variant must be auto|a|b|c, got '" + val + "'");
            } else {
                throw ParseError("unknown key '" + key + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ", key '" + key +
                             "': " + e.what());
        }
    }
    validate(c);
    return c;
}

std::string emit_config(const ScenarioConfig& c) {
    std::ostringstream out;
    out << "n = " << c.n << "\n";
    out << "suite_n = ";
    for (size_t k = 0; k < c.suite_n.size(); ++k) out << (k ? "," : "") << c.suite_n[k];
    out << "\n";
    out << "tau = " << format_complex(c.tau) << "\n";
    out << "gamma = " << format_complex(c.gamma) << "\n";
    out << "hbar = " << fmt_full(c.hbar) << "\n";
    out << "mc2 = " << fmt_full(c.mc2) << "\n";
    out << "cm_s = " << fmt_full(c.cm_s) << "\n";
    out << "spectral_points = ";
    for (size_t k = 0; k < c.spectral_points.size(); ++k) {
        if (k) out << "; ";
        out << format_complex(c.spectral_points[k].first) << ","
            << format_complex(c.spectral_points[k].second);
    }
    out << "\n";
    out << "seeds = ";
    for (size_t k = 0; k < c.seeds.size(); ++k) out << (k ? "," : "") << c.seeds[k];
    out << "\n";
    out << "checks = ";
    for (size_t k = 0; k < c.checks.size(); ++k) out << (k ? "," : "") << c.checks[k];
    out << "\n";
    out << "tolerances = ";
    size_t k = 0;
    for (const auto& [name, tol] : c.tolerances)
        out << (k++ ? "," : "") << name << ":" << fmt_full(tol);
    out << "\n";
    out << "series.max_terms = " << c.series.max_terms << "\n";
    out << "series.tail_tol = " << fmt_full(c.series.tail_tol) << "\n";
    out << "s12_variant = "
        << (c.s12_variant == S12Mode::auto_select
                ? "auto"
                : c.s12_variant == S12Mode::a ? "a"
                : c.s12_variant == S12Mode::b ? "b" : "c")
        << "\n";
    return out.str();
}

std::string digest(const std::string& canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string emit_report(const std::vector<verify::ResidualReport>& reports,
                        Format format) {
    if (format == Format::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : reports) {
            nlohmann::ordered_json o;
            o["check_name"] = r.check_name;
            o["abs_residual"] = fmt_double(r.abs_residual);
            o["rel_residual"] = fmt_double(r.rel_residual);
            o["tolerance"] = fmt_double(r.tolerance);
            o["inputs_digest"] = r.inputs_digest;
            o["passed"] = r.passed;
            o["notes"] = r.notes;
            arr.push_back(std::move(o));
        }
        return arr.dump(2) + "\n";
    }
    if (format == Format::csv) {
        std::ostringstream out;
        out << "check_name,abs_residual,rel_residual,tolerance,inputs_digest,passed,notes\n";
        for (const auto& r : reports) {
            std::string notes = r.notes;
            std::replace(notes.begin(), notes.end(), ',', ';');
            out << r.check_name << ',' << fmt_double(r.abs_residual) << ','
                << fmt_double(r.rel_residual) << ',' << fmt_double(r.tolerance) << ','
                << r.inputs_digest << ',' << (r.passed ? "true" : "false") << ','
                << notes << "\n";
        }
        return out.str();
    }
    size_t w = 10;
    for (const auto& r : reports) w = std::max(w, r.check_name.size());
    std::ostringstream out;
    for (const auto& r : reports) {
        out << (r.passed ? "[ ok ] " : "[FAIL] ") << r.check_name
            << std::string(w - r.check_name.size() + 2, ' ')
            << "abs=" << fmt_double(r.abs_residual)
            << "  rel=" << fmt_double(r.rel_residual)
            << "  tol=" << fmt_double(r.tolerance) << "  " << r.notes << "\n";
    }
    size_t npass = 0;
    for (const auto& r : reports) npass += r.passed ? 1 : 0;
    out << npass << "/" << reports.size() << " checks passed\n";
    return out.str();
}

} // namespace rslab::config
