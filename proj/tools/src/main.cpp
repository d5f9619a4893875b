#include <iostream>

#include "zinf_cli/cli.hpp"

int main(int argc, char** argv) { return zinf::cli::main_entry(argc, argv, std::cout, std::cerr); }
