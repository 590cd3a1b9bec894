// Scenario configuration (flat key=value text) and report emission.

#ifndef RSLAB_CONFIG_HPP
#define RSLAB_CONFIG_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rslab/elliptic.hpp"
#include "rslab/report.hpp"

namespace rslab::config {

using cplx = std::complex<double>;

enum class S12Mode { auto_select, a, b, c };

struct ScenarioConfig {
    int n = 3;                       // target n for single-shot commands
    std::vector<int> suite_n = {2, 3, 4};
    cplx tau{0.0, 1.0};
    cplx gamma{0.21, 0.13};
    double hbar = 0.1;
    double mc2 = 1.0;
    double cm_s = 1.3;               // CM coupling used by the suite
    std::vector<std::pair<cplx, cplx>> spectral_points = {
        {{0.17, 0.03}, {-0.23, -0.05}},
        {{0.31, 0.08}, {-0.11, -0.02}},
        {{0.12, 0.05}, {-0.33, -0.04}},
    };
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<std::string> checks; // empty in the struct; defaulted on parse
    std::map<std::string, double> tolerances;
    elliptic::SeriesControl series{};
    S12Mode s12_variant = S12Mode::auto_select;
};

// All check names known to the suite, in canonical order.
const std::vector<std::string>& all_check_names();
// Default tolerance ladder per check.
const std::map<std::string, double>& default_tolerances();

ScenarioConfig default_config();

// Flat key=value document; '#' starts a comment. Complex numbers use the
// "a+bi" syntax with optional spaces. Lists are comma separated; spectral
// pairs are "u,v" pairs separated by ';'.
ScenarioConfig parse_config(const std::string& text);

// Round-trip form of a config (parse_config(emit_config(c)) == c).
std::string emit_config(const ScenarioConfig& c);

cplx parse_complex(const std::string& text);
std::string format_complex(cplx z);

enum class Format { json, csv, human };

std::string emit_report(const std::vector<verify::ResidualReport>& reports,
                        Format format);

// FNV-1a digest of a canonical input description, for report provenance.
std::string digest(const std::string& canonical);

} // namespace rslab::config

#endif
