#include <iostream>

#include "qslimit/cli.hpp"

int main(int argc, char** argv) { return qslimit::run_cli(argc, argv, std::cout, std::cerr); }
