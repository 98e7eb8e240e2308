#include <iostream>

#include "asso_cli/cli.hpp"

int main(int argc, char** argv) { return asso::cli::run(argc, argv, std::cout, std::cerr); }
