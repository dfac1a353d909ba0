#include <iostream>
#include <string>
#include <vector>

#include "agentcap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return agentcap::cli::run(args, std::cout, std::cerr);
}
