#include "growthlab/report.hpp"

#include <iostream>

int main(int argc, char** argv) { return growthlab::main_entry(argc, argv, std::cout, std::cerr); }
