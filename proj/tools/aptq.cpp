#include <iostream>

#include "apt/cli.hpp"

int main(int argc, char** argv) { return apt::run_cli(argc, argv, std::cout, std::cerr); }
