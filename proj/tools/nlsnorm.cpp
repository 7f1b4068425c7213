#include "nlsnorm/cli.hpp"

int main(int argc, char **argv)
{
  return nlsnorm::run_cli(argc, argv);
}
