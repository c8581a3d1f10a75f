#include "mdim/cli.hpp"

int main(int argc, char** argv) { return mdim::run_cli(argc, argv); }
