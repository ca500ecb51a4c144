#include "vocablab/cli.hpp"

int main(int argc, char** argv) { return vocablab::cli::dispatch(argc, argv); }
