#!/usr/bin/env python3
"""Writes the groupoid-kit fixtures in data/groupoids as action groupoids.

An arrow (obj, g) goes from obj to g.obj; (a, g) * (g.a, h) = (a, hg).
"""
import itertools
import json
import pathlib
import sys

S3 = list(itertools.permutations(range(3)))
S3_NAMES = {(0, 1, 2): "e", (1, 2, 0): "r", (2, 0, 1): "r2",
            (0, 2, 1): "s0", (2, 1, 0): "s1", (1, 0, 2): "s2"}


def pmul(p, q):
    """p after q."""
    return tuple(p[q[i]] for i in range(3))


def product_group(*factors):
    """Each factor is (elements, mul, name); returns (elements, mul, name)."""
    elems = list(itertools.product(*[f[0] for f in factors]))

    def mul(g, h):
        return tuple(f[1](a, b) for f, a, b in zip(factors, g, h))

    def name(g):
        parts = [f[2](a) for f, a in zip(factors, g)]
        return ".".join(parts)
    return elems, mul, name


def cyclic(k, tag):
    return list(range(k)), (lambda a, b: (a + b) % k), (lambda a: f"{tag}{a}")


SYM3 = (S3, pmul, lambda p: S3_NAMES[p])


def build(objects, group, act, H, N, H_bar=None, kernel=None):
    elems, mul, name = group
    arrows, mult = [], []

    def label(o, g):
        return f"{o}:{name(g)}"
    for o in objects:
        for g in elems:
            arrows.append({"src": o, "label": label(o, g), "tgt": act(g, o)})
    for o in objects:
        for g in elems:
            for h in elems:
                mult.append([label(o, g), label(act(g, o), h), label(o, mul(h, g))])
    doc = {
        "objects": objects,
        "arrows": arrows,
        "mult": mult,
        "H": [label(o, g) for o in objects for g in elems if H(g)],
        "N": {o: [label(o, g) for g in elems if N(o, g)] for o in objects},
    }
    if H_bar is not None:
        doc["H_bar"] = [label(o, g) for o in objects for g in elems if H_bar(g)]
    if kernel is not None:
        doc["kernel"] = {o: [label(o, g) for g in elems if kernel(g)] for o in objects}
    return doc


def main(out):
    out = pathlib.Path(out)
    pts = ["a", "b", "c"]
    e = (0, 1, 2)
    rot = {e, (1, 2, 0), (2, 0, 1)}

    def perm_act(p, o):
        return pts[p[pts.index(o)]]

    # Whole groupoid generated by the group, trivial N.
    normalized = build(pts, SYM3, perm_act, H=lambda g: True, N=lambda o, g: g == e)

    # S3 x C2: C2 swaps two objects, N = C3 in S3 (normal), H = <s0> x C2.
    two = ["p", "q"]
    g2 = product_group(SYM3, cyclic(2, "w"))

    def swap_act(g, o):
        return two[(two.index(o) + g[1]) % 2]
    disjoint = build(two, g2, swap_act,
                     H=lambda g: g[0] in {e, (0, 2, 1)},
                     N=lambda o, g: g[0] in rot and g[1] == 0,
                     H_bar=lambda g: True,
                     kernel=lambda g: g[0] in rot and g[1] == 0)

    # S3 x C2(k) x C2(m) on three points; k and m act trivially and lie in
    # every N; k is also in H, so N and the H-loops share a kernel element.
    g3 = product_group(SYM3, cyclic(2, "k"), cyclic(2, "m"))

    def perm_act3(g, o):
        return perm_act(g[0], o)
    shared = build(pts, g3, perm_act3,
                   H=lambda g: g[2] == 0,
                   N=lambda o, g: g[0] == e,
                   H_bar=lambda g: True,
                   kernel=lambda g: g[0] == e)

    # H = C3 acting transitively, N trivial: uniform but the product misses
    # the reflections.
    non_semi = build(pts, SYM3, perm_act, H=lambda g: g in rot, N=lambda o, g: g == e)

    for name, doc in [("normalized", normalized), ("disjoint", disjoint),
                      ("kernel_shared", shared), ("non_semi", non_semi)]:
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).parent.parent / "data" / "groupoids")
