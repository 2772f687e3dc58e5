#include "srp/cli/app.hpp"

int main(int argc, char** argv) { return srp::cli::run(argc, argv); }
