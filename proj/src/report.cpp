#include "qtoda/report.hpp"

#include <complex>

namespace qtoda {

nlohmann::ordered_json CheckReport::to_json() const {
    nlohmann::ordered_json j;
    j["check"] = check;
    j["paper_anchor"] = paper_anchor;
    j["status"] = pass ? "pass" : "fail";
    j["residual"] = residual;
    j["runtime_ms"] = runtime_ms;
    j["seed"] = seed;
    if (!details.empty()) j["details"] = details;
    return j;
}

nlohmann::ordered_json complex_to_json(std::complex<double> z) {
    return nlohmann::ordered_json::array({z.real(), z.imag()});
}

}  // namespace qtoda
