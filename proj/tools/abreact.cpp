#include "abreact/cli.hpp"

int main(int argc, char** argv) { return abreact::run_cli(argc, argv); }
