#include "gradvar/cli.hpp"

int main(int argc, char** argv) { return gradvar::run_cli(argc, argv); }
