#include "sdp/cli.hpp"

int main(int argc, char** argv) { return sdp::cli::run_main(argc, argv); }
