#include "cli.hpp"

int main(int argc, char** argv) { return cryptsim::cli::cli_main(argc, argv); }
