#include <iostream>

#include "qdilog/cli.hpp"

int main(int argc, char** argv) { return qdilog::cli::run(argc, argv, std::cout, std::cerr); }
