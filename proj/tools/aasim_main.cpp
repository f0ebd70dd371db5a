// SPDX-License-Identifier: Apache-2.0
#include "aasim/cli.hpp"

int main(int argc, char** argv) { return aasim::cli::run(argc, argv); }
