#include "gsde/cli.hpp"

int main(int argc, char** argv) { return gsde::cli::run_cli(argc, argv); }
