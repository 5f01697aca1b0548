#include "slcone/cli.hpp"

int main(int argc, char** argv) { return slcone::cli_run(argc, argv); }
