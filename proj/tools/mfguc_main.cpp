#include <iostream>

#include "mfguc/cli.hpp"

int main(int argc, char** argv) { return mfguc::cli::run(argc, argv, std::cout, std::cerr); }
