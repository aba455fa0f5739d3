#include <iostream>

#include "volres/acceptance.hpp"

int main() {
    const auto results = volres::run_acceptance(42);
    volres::print_acceptance(std::cout, results);
    return volres::all_passed(results) ? 0 : 1;
}
