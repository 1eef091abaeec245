#include "motormap/cli.hpp"

int main(int argc, char** argv) { return motormap::run_cli(argc, argv); }
