#include "gptw/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gptw::cli::run(argc, argv, std::cout, std::cerr); }
