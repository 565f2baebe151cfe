#include <iostream>

#include "skillroute/cli.hpp"

int main(int argc, char** argv) { return skillroute::run_cli(argc, argv, std::cout, std::cerr); }
