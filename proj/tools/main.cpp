#include <iostream>

#include "so3filter/cli.hpp"

int main(int argc, char** argv) { return so3filter::cli::cli_main(argc, argv, std::cout, std::cerr); }
