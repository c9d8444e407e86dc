"""Test-only BN254 pairing oracle built on py_ecc.

Prints reduced pairing values re-expressed in the Fq2/Fq6/Fq12 tower used by
the C++ code, ordered (c0.c0, c0.c1, c0.c2, c1.c0, c1.c1, c1.c2), each Fq2 as
(real, imaginary). Tower mapping: u = w^6 - 9, v = w^2.
"""

import sys

from py_ecc import optimized_bn128 as bn

Q = bn.field_modulus


def to_tower(f):
    p = [int(c) for c in f.coeffs]
    # coefficient of w^k as an Fq2 element x + y u
    wk = [((p[k] + 9 * p[k + 6]) % Q, p[k + 6] % Q) for k in range(6)]
    # w^0 -> c0.c0, w^2 -> c0.c1, w^4 -> c0.c2, w^1 -> c1.c0, w^3 -> c1.c1, w^5 -> c1.c2
    order = [0, 2, 4, 1, 3, 5]
    return [wk[k] for k in order]


def main():
    a = int(sys.argv[1]) if len(sys.argv) > 1 else 1
    b = int(sys.argv[2]) if len(sys.argv) > 2 else 1
    f = bn.pairing(bn.multiply(bn.G2, b), bn.multiply(bn.G1, a))
    for x, y in to_tower(f):
        print(x)
        print(y)


if __name__ == "__main__":
    main()
