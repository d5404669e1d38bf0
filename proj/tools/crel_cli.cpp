#include <cstdio>

int main() {
    std::puts("crel: placeholder");
    return 0;
}
