#include <iostream>

#include "autologit/cli.hpp"

int main(int argc, char** argv) { return autologit::run_command(argc, argv, std::cout, std::cerr); }
