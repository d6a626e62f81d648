#include "depthup/cli.hpp"

int main(int argc, char** argv) { return depthup::cli::run(argc, argv); }
