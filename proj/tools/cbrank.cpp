#include <iostream>

#include "cbr/cli.hpp"

int main(int argc, char** argv) { return cbr::run_cli(argc, argv, std::cout, std::cerr); }
