#include <iostream>

#include "quatpinv/cli.hpp"

int main(int argc, char** argv) { return quatpinv::run_cli(argc, argv, std::cout, std::cerr); }
