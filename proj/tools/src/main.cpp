#include "spinjj/cli/cli.hpp"

int main(int argc, char** argv) { return spinjj::cli::run(argc, argv); }
