#include <iostream>

#include "irsfd/cli.hpp"

int main(int argc, char** argv) { return irsfd::cli_main(argc, argv, std::cout, std::cerr); }
