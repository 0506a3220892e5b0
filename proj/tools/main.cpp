#include "stokes/cli.hpp"

int main(int argc, char** argv)
{
    return stokes::run_cli(argc, argv);
}
