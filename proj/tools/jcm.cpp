#include <iostream>

#include "jcm/cli.hpp"

int main(int argc, char** argv) { return jcm::cli::run(argc, argv, std::cout, std::cerr); }
