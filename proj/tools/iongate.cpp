#include <iostream>

#include "iongate/cli/commands.hpp"

int main(int argc, char** argv) { return iongate::cli::run(argc, argv, std::cout, std::cerr); }
