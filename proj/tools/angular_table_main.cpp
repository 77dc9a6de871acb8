// Regenerates the angular quadrature table shipped in data/. Usage:
//   angular_table [K_max] > data/angular_table_k8.csv
// Columns: node index, direction components, surface weight. The committed
// table is for K_max = 8; tests cross-check it against a fresh build.
#include <cstdio>
#include <cstdlib>

#include "singrad/angular.hpp"

int main(int argc, char** argv) {
    int K = 8;
    if (argc > 1) K = std::atoi(argv[1]);
    if (K < 0 || K > 64) {
        std::fprintf(stderr, "K_max out of range: %d\n", K);
        return 1;
    }
    const singrad::AngularSet set = singrad::make_angular_set(K);
    std::printf("index,x,y,z,weight\n");
    for (std::size_t j = 0; j < set.n_nodes(); ++j) {
        std::printf("%zu,%.15g,%.15g,%.15g,%.15g\n", j, set.nodes[j].dir[0], set.nodes[j].dir[1],
                    set.nodes[j].dir[2], set.nodes[j].weight);
    }
    return 0;
}
