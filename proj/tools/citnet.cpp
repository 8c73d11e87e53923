#include "citnet/cli.hpp"

int main(int argc, char** argv) { return citnet::run_cli(argc, argv); }
