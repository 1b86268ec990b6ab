#include "embamp/cli.hpp"

int main(int argc, char** argv) { return embamp::cli::run(argc, argv); }
