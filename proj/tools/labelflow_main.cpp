#include <iostream>

#include "labelflow/cli.hpp"

int main(int argc, char** argv) { return labelflow::execute(argc, argv, std::cout, std::cerr); }
