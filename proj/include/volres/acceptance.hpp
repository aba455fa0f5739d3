#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace volres {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs acceptance criteria 1..11 (randomised parts use `seed`).
std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 42);

/// One line per criterion: "PASS  3  mittag-leffler  <detail>  (0.01 s)".
void print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace volres
