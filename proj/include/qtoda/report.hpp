#pragma once

#include <chrono>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace qtoda {

struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetExhausted : std::runtime_error {
    int found;
    BudgetExhausted(const std::string& what, int found_count)
        : std::runtime_error(what), found(found_count) {}
};

// One verification result; anchors name the verified statement so a failing
// run cites what was falsified.
struct CheckReport {
    std::string check;
    std::string paper_anchor;
    bool pass = false;
    double residual = 0.0;
    std::int64_t runtime_ms = 0;
    std::uint64_t seed = 0;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();

    nlohmann::ordered_json to_json() const;
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    std::int64_t ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

nlohmann::ordered_json complex_to_json(std::complex<double> z);

}  // namespace qtoda
