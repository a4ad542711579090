#include <iostream>

#include "nesy/cli.hpp"

int main(int argc, char** argv) { return nesy::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr); }
