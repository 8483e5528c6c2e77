// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "kglab/cli.hpp"

int main(int argc, char** argv) { return kglab::run_cli(argc, argv, std::cout, std::cerr); }
