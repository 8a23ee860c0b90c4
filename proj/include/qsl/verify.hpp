// verify.hpp
// Randomized property suites behind `qsl verify`.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qsl {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Suite names accepted by run_suites (besides "all").
const std::vector<std::string>& suite_names();

// samples scales the random trials of every suite (the trig suite uses it
// as-is). Throws DomainError on an unknown suite name.
std::vector<CheckResult> run_suites(std::string_view suite, std::size_t samples,
                                    std::uint64_t seed = 20080101);

}  // namespace qsl
