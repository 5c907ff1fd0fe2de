#include <iostream>

#include "ssqt/cli.hpp"

int main(int argc, char** argv) { return ssqt::cli::dispatch(argc, argv, std::cout, std::cerr); }
