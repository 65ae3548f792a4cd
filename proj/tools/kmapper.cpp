#include "kmapper/cli.hpp"

int main(int argc, char** argv) { return kmapper::cli::run(argc, argv); }
