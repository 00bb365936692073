#include "specgap/cli.hpp"

int main(int argc, char** argv) { return specgap::cli::run(argc, argv); }
