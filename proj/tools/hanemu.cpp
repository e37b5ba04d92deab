#include "hanemu/cli.hpp"

int main(int argc, char** argv) { return hanemu::cli::run_cli(argc, argv); }
