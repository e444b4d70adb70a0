#include "aodecomp/cli.hpp"

int main(int argc, char** argv) { return aodecomp::cli::run_cli(argc, argv); }
