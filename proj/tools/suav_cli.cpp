#include <iostream>

#include "suav/cli.hpp"

int main(int argc, char** argv) { return suav::run_cli(argc, argv, std::cout, std::cerr); }
