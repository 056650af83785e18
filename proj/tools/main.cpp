#include <hhg/commands.hpp>

#include <iostream>

int main(int argc, char** argv) { return hhg::run_cli(argc, argv, std::cout, std::cerr); }
