#include <iostream>

#include "ionspec/cli.hpp"

int main(int argc, char** argv) { return ionspec::cli_main(argc, argv, std::cout, std::cerr); }
