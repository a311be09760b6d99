#include "cli.hpp"

int main(int argc, char** argv) { return cuelex::cli::run(argc, argv); }
