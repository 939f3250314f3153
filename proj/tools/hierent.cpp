#include <iostream>

#include "hierent/cli.hpp"

int main(int argc, char** argv) { return hierent::run_cli(argc, argv, std::cout, std::cerr); }
