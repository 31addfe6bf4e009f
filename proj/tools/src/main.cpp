#include <iostream>

#include "lel_cli/cli.hpp"

int main(int argc, char** argv) { return lel::cli::main_entry(argc, argv, std::cout, std::cerr); }
