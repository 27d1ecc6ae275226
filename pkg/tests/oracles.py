"""Independent brute-force references.

Everything here is plain Python over dicts and itertools. Nothing is imported
from the package under test, so a bug in the vectorized code cannot leak in.
"""
import itertools
import math
from collections import defaultdict


def h2(p):
    """Binary entropy in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def joint_dict(ch, pu, pvu, px1u, px2v):
    """p(u,v,x1,x2,y,y1) as a dict keyed by index tuples.

    ``ch`` is a nested list/array indexed [x1][x2][y][y1].
    """
    out = {}
    nx1, nx2 = len(ch), len(ch[0])
    ny, ny1 = len(ch[0][0]), len(ch[0][0][0])
    for u in range(len(pu)):
        for v in range(len(pvu[0])):
            for x1 in range(nx1):
                for x2 in range(nx2):
                    w = pu[u] * pvu[u][v] * px1u[u][x1] * px2v[v][x2]
                    if w == 0.0:
                        continue
                    for y in range(ny):
                        for y1 in range(ny1):
                            m = w * float(ch[x1][x2][y][y1])
                            if m > 0.0:
                                out[(u, v, x1, x2, y, y1)] = m
    return out


NAMES = ("U", "V", "X1", "X2", "Y", "Y1")


def _marg(joint, names):
    pos = [NAMES.index(n) for n in names]
    acc = defaultdict(float)
    for key, m in joint.items():
        acc[tuple(key[i] for i in pos)] += m
    return acc


def H(joint, names):
    if not names:
        return 0.0
    return -sum(m * math.log2(m) for m in _marg(joint, names).values() if m > 0)


def cmi(joint, a, b, c=()):
    a, b, c = list(a), list(b), list(c)
    return H(joint, a + c) + H(joint, b + c) - H(joint, a + b + c) - H(joint, c)


def equivocation(ch, x1words, vwords, px2v, n):
    """H(W2 | W1, Y1^n) by explicit enumeration of (w1, w2, l, x2^n, y1^n).

    ``vwords`` is indexed [w2][l] -> length-n sequence.
    """
    m1, m2, nl = len(x1words), len(vwords), len(vwords[0])
    nx2 = len(px2v[0])
    ny1 = len(ch[0][0][0])
    # p(y1 | x1, x2)
    py1 = [[[sum(ch[a][b][y][z] for y in range(len(ch[0][0]))) for z in range(ny1)]
            for b in range(nx2)] for a in range(len(ch))]
    total = 0.0
    for w1 in range(m1):
        x1 = x1words[w1]
        table = defaultdict(float)  # (w2, y1seq) -> prob given w1
        for w2 in range(m2):
            for l in range(nl):
                v = vwords[w2][l]
                for x2 in itertools.product(range(nx2), repeat=n):
                    px = 1.0
                    for i in range(n):
                        px *= px2v[v[i]][x2[i]]
                    if px == 0.0:
                        continue
                    for y1 in itertools.product(range(ny1), repeat=n):
                        py = px
                        for i in range(n):
                            py *= py1[x1[i]][x2[i]][y1[i]]
                        if py > 0.0:
                            table[(w2, y1)] += py / (m2 * nl)
        py1tot = defaultdict(float)
        for (w2, y1), m in table.items():
            py1tot[y1] += m
        hw2y1 = -sum(m * math.log2(m) for m in table.values() if m > 0)
        hy1 = -sum(m * math.log2(m) for m in py1tot.values() if m > 0)
        total += (hw2y1 - hy1) / m1
    return total
