#include <kdvexp/cli.hpp>

int main(int argc, char** argv) { return kdvexp::cli_main(argc, argv); }
