// lab: command-line front door. Subcommands are wired up as the library
// grows; see README for usage.
#include <iostream>

int main() {
  std::cout << "lab: no subcommands wired yet\n";
  return 2;
}
