#include "bannerscope/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bannerscope::cli::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
