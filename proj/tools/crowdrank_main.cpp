#include <iostream>
#include <string>
#include <vector>

#include "crowdrank/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return crowdrank::run_command(args, std::cout, std::cerr);
}
