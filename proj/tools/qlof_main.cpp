#include <iostream>
#include <string>
#include <vector>

#include "qlof/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qlof::run_cli(args, std::cout, std::cerr);
}
