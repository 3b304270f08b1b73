#include <iostream>

#include "swfront/cli.hpp"

int main(int argc, char** argv) { return swfront::run_cli(argc, argv, std::cout, std::cerr); }
