#include <iostream>

#include "jostlab/cli.hpp"

int main(int argc, char** argv) { return jostlab::run_cli(argc, argv, std::cout, std::cerr); }
