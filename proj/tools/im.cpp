#include "pim/cli.hpp"

int main(int argc, char** argv) { return pim::run_cli(argc, argv); }
