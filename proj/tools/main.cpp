#include "slpos/cli.hpp"

int main(int argc, char** argv) { return slpos::run_cli(argc, argv); }
