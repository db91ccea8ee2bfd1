#include <iostream>
#include <string>
#include <vector>

#include "vstab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vstab::run(args, std::cout, std::cerr);
}
