#include <iostream>

#include "qdyn/cli.hpp"

int main(int argc, char** argv) { return qdyn::cli::main_cli(argc, argv, std::cout, std::cerr); }
