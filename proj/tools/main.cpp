#include <iostream>

#include "pipeline.hpp"

int main(int argc, char** argv) { return cxg::cli::main(argc, argv, std::cout, std::cerr); }
