#include "amr/cli/cli.hpp"

int main(int argc, char** argv) { return amr::cli::run(argc, argv); }
