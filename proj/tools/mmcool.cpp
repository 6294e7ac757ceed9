#include <iostream>

#include "mmcool/cli.hpp"

int main(int argc, char** argv) { return mmcool::cli::main_entry(argc, argv, std::cout, std::cerr); }
