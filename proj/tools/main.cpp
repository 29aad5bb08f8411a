#include "tomokit/cli.hpp"

int main(int argc, char** argv) { return tomokit::cli::run(argc, argv); }
