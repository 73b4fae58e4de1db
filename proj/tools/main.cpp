#include "cli_app.hpp"

int main(int argc, char** argv) { return hdmanova::cli::run(argc, argv); }
