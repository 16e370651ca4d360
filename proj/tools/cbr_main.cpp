#include <cstdio>

int main() {
  std::printf("cbr workbench: commands not wired up yet\n");
  return 1;
}
