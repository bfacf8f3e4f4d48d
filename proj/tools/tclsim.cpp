#include <iostream>

#include "tcl/cli.hpp"

int main(int argc, char** argv) { return tcl::cli::main_cli(argc, argv, std::cout, std::cerr); }
