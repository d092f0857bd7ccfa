#include "recobert/cli.hpp"

int main(int argc, char** argv) { return recobert::cli::run(argc, argv); }
