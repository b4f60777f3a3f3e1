#include "wplab/cli.hpp"

int main(int argc, char** argv) { return wplab::cli::run(argc, argv); }
