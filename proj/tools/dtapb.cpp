#include <iostream>

#include "dtapb/cli.hpp"

int main(int argc, char** argv) { return dtapb::run_cli(argc, argv, std::cout, std::cerr); }
