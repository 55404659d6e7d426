#include "cli.hpp"

int main(int argc, char** argv) { return goq::cli::run(argc, argv); }
