#include "cli.hpp"

int main(int argc, char** argv) { return consensus_lab::cli::run(argc, argv); }
