#include "smsd/cli_config.hpp"

int main(int argc, char** argv) { return smsd::run_cli(argc, argv); }
