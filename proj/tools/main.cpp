#include <iostream>

#include "a2g/cli.hpp"

int main(int argc, char** argv) { return a2g::run_cli(argc, argv, std::cout, std::cerr); }
