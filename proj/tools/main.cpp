#include "lradapt/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return lradapt::cli::cli_main(argc, argv, std::cout, std::cerr); }
