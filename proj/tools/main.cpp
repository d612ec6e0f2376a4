#include "horizonlab/cli.hpp"

int main(int argc, char** argv) { return horizonlab::cli::run(argc, argv); }
