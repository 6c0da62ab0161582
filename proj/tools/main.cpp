#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ensheat::run_cli(argc, argv, std::cout, std::cerr); }
