#include <iostream>

#include "kgeo/cli.hpp"

int main(int argc, char** argv) { return kgeo::cli::run(argc, argv, std::cout, std::cerr); }
