#include <iostream>
#include "qwreath/snplus.hpp"
int main() {
    using namespace qwreath;
    auto x = SnPlusElement::generator(4, 1, 1);
    std::cout << "h(u11) at N=4: " << to_string(haar(x)) << "\n";
    return 0;
}
