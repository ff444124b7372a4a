#include "hrb/cli.hpp"

int main(int argc, char** argv) { return hrb::cli::run_main(argc, argv); }
