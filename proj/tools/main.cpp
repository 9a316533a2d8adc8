#include "hdlda/cli.hpp"

int main(int argc, char** argv) { return hdlda::dispatch(argc, argv); }
