#include "dform/app.hpp"

int main(int argc, char** argv) { return dform::cli_main(argc, argv); }
