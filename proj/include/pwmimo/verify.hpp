#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pwmimo {

/// Outcome of one verification suite: how many trials passed and a short
/// human-readable summary line.
struct SuiteResult {
    std::string suite;
    long long passed = 0;
    long long total = 0;
    std::string detail;

    bool ok() const { return total > 0 && passed == total; }
};

/// Property suites checking the library against independently coded oracles
/// (brute-force enumeration, literal equation transcriptions, naive Gaussian
/// elimination) and against the closed-form fixed-point/contraction claims.
/// `trials` scales the number of random instances; every suite is
/// deterministic in (trials, seed).
std::vector<std::string> verification_suite_names();

SuiteResult run_verification_suite(const std::string& name, long long trials,
                                   std::uint64_t seed);

std::vector<SuiteResult> run_all_verification_suites(long long trials, std::uint64_t seed);

}  // namespace pwmimo
