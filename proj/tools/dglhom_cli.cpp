#include <cstdio>

int main() {
  std::puts("dglhom: not wired up yet");
  return 0;
}
