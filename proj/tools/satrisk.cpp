#include "satrisk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return satrisk::run_cli(argc, argv, std::cout, std::cerr);
}
