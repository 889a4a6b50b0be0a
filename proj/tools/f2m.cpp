#include "f2m/cli/app.hpp"

int main(int argc, char** argv) { return f2m::cli::dispatch(argc, argv); }
