#include <iostream>

#include "caa/experiment.hpp"

int main(int argc, char** argv) { return caa::run_cli(argc, argv, std::cout, std::cerr); }
