#include "skrp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return skrp::cli::main(argc, argv, std::cout, std::cerr); }
