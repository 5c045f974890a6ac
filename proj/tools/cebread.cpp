#include <iostream>

#include "cebread/cli.hpp"

int main(int argc, char** argv) { return cebread::cli::run(argc, argv, std::cout, std::cerr); }
