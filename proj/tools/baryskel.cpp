#include "baryskel/cli.hpp"

int main(int argc, char** argv) { return baryskel::run_cli(argc, argv); }
