#include <iostream>

#include "jcap_cli.hpp"

int main(int argc, char** argv) { return jcap::cli::run(argc, argv, std::cout, std::cerr); }
