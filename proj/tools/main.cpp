#include "cinglear/cli.hpp"

int main(int argc, char** argv) { return cinglear::cli::run(argc, argv); }
