#ifndef RSLAB_REPORT_HPP
#define RSLAB_REPORT_HPP

#include <string>
#include <vector>

namespace rslab::verify {

// One named identity check. passed follows the relative residual, except
// when the reference norm is below 1e-8, where the absolute one decides.
struct ResidualReport {
    std::string check_name;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double tolerance = 0.0;
    std::string inputs_digest;
    bool passed = false;
    std::string notes;
};

inline ResidualReport make_report(std::string name, double abs, double ref_norm,
                                  double tol, std::string digest,
                                  std::string notes = {}) {
    ResidualReport r;
    r.check_name = std::move(name);
    r.abs_residual = abs;
    r.rel_residual = ref_norm < 1e-8 ? abs : abs / ref_norm;
    r.tolerance = tol;
    r.inputs_digest = std::move(digest);
    r.passed = (ref_norm < 1e-8 ? abs : r.rel_residual) <= tol;
    r.notes = std::move(notes);
    return r;
}

} // namespace rslab::verify

#endif
