#include "lhits/cli/app.hpp"

int main(int argc, char** argv) { return lhits::cli::run(argc, argv); }
