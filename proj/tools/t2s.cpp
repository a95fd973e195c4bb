#include <iostream>

#include "t2s/cli.hpp"

int main(int argc, char** argv) { return t2s::cli::run(argc, argv, std::cout, std::cerr); }
