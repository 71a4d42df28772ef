#include "w2i/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return w2i::run_cli(argc, argv, std::cout, std::cerr); }
