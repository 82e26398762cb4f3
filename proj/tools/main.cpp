#include "perco/cli.hpp"

int main(int argc, char** argv) { return perco::cli_main(argc, argv); }
