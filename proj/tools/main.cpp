#include <nqed/cli_main.hpp>

int main(int argc, char** argv) { return nqed::run_cli(argc, argv); }
