#include <iostream>

#include "nspregen/cli.hpp"

int main(int argc, char** argv) { return nspregen::cli::run(argc, argv, std::cout, std::cerr); }
