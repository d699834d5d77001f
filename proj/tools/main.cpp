#include <iostream>

#include "qdot_erasure/cli_app.hpp"

int main(int argc, char** argv) { return qdot::run_cli(argc, argv, std::cout, std::cerr); }
