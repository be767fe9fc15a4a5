#include <iostream>

#include "vidart/cli.hpp"

int main(int argc, char** argv) { return vidart::cli::run(argc, argv, std::cout, std::cerr); }
