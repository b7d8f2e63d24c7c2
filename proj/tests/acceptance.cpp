// Acceptance suite: one pass/fail line per criterion. Placeholder.
#include <iostream>
int main() {
    std::cout << "acceptance: placeholder\n";
    return 1;
}
