#include "cli_app.hpp"

int main(int argc, char** argv)
{
    return morphogen::cli::main(argc, argv);
}
