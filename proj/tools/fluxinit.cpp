#include "fluxinit/cli.hpp"

int main(int argc, char** argv) { return fluxinit::cli_main(argc, argv); }
