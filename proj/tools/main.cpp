#include "zrp/cli.hpp"

int main(int argc, char** argv) { return zrp::run_cli(argc, argv); }
