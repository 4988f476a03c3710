#include <cstdio>

int main() {
    std::puts("symdyn: command line not wired up yet");
    return 0;
}
