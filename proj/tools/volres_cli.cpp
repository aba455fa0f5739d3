#include <iostream>

#include "volres/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return volres::run(args, std::cout, std::cerr);
}
