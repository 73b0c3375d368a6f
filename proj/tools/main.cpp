#include "topiclens/cli.hpp"

int main(int argc, char** argv) { return topiclens::cli::run(argc, argv); }
