// mkdv: scattering / reconstruction / evolution / asymptotics driver.
// Subcommands land here as the library fills in.

#include <cstdio>

int main() {
    std::puts("mkdv: subcommands not wired up yet");
    return 2;
}
