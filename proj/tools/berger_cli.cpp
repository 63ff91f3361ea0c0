// Placeholder; the full command-line front end is assembled after the library.
#include <cstdio>

int main() {
    std::puts("berger: subcommands not wired up yet");
    return 2;
}
