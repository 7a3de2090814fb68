#include <iostream>

#include "thex/cli.hpp"

int main(int argc, char** argv) { return thex::run_cli(argc, argv, std::cout, std::cerr); }
