#include <iostream>

#include "wornsim/cli.hpp"

int main(int argc, char** argv) { return wornsim::run_cli(argc, argv, std::cout, std::cerr); }
