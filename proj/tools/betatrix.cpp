#include "betatrix/cli.hpp"

int main(int argc, char** argv) { return betatrix::cli::run(argc, argv); }
