"""JSON and DOT forms for everything the command line reads or writes.

Parsing is strict: unknown fields, wrong types, and dangling references raise
SchemaError carrying a JSON pointer to the offending spot.  Serializers emit
deterministic documents (arrows by id, map entries sorted), so equal values
produce byte-equal canonical dumps.

Oracles and tracked quivers have no value equality, so "round trip" for them
means: parsing the serialized form yields an object whose own serialization
is identical.
"""
from __future__ import annotations

import json
import re

from .cluster import (Seed, TrivialSemifield, TropicalSemifield, at_basepoint,
                      initial_seed, is_principal, principal_seed)
from .coverings import Covering, CoveringOracle
from .poly import MultiPoly, RationalFn
from .quiver import Arrow, Quiver
from .surfaces import (COLOR_I, COLOR_II, NOTCHED, PLAIN, ColoredSurface,
                       FlipGraph, TaggedTriangulation, Triangulation)
from .walks import (AbelianQuotientOracle, FullOracle, GeneratedOracle,
                    Membership, Step, TrivialOracle, Walk)


class SchemaError(ValueError):
    """A document violates its schema; `pointer` locates the offense."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")


def _fail(pointer, message):
    raise SchemaError(pointer, message)


def _object(doc, pointer, keys):
    if not isinstance(doc, dict):
        _fail(pointer, "expected an object")
    for k in doc:
        if k not in keys:
            _fail(f"{pointer}/{k}", "unknown field")
    return doc


def _field(doc, key, pointer):
    if key not in doc:
        _fail(pointer, f"missing field {key!r}")
    return doc[key]


def _array(x, pointer):
    if not isinstance(x, list):
        _fail(pointer, "expected an array")
    return x


def _integer(x, pointer, low=None):
    if not isinstance(x, int) or isinstance(x, bool):
        _fail(pointer, "expected an integer")
    if low is not None and x < low:
        _fail(pointer, f"expected an integer >= {low}")
    return x


def _string(x, pointer):
    if not isinstance(x, str):
        _fail(pointer, "expected a string")
    return x


def dumps_canonical(doc) -> str:
    """Stable text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# quivers


def quiver_to_json(q: Quiver) -> dict:
    arrows = []
    for a in sorted(q.arrows, key=lambda a: a.id):
        entry = {"id": a.id, "src": a.src, "tgt": a.tgt}
        if a.label is not None:
            entry["label"] = a.label
        arrows.append(entry)
    return {"vertices": q.n, "arrows": arrows}


def quiver_from_json(doc, pointer: str = "") -> Quiver:
    _object(doc, pointer, {"vertices", "arrows"})
    n = _integer(_field(doc, "vertices", pointer), f"{pointer}/vertices", low=0)
    arrows = []
    seen = set()
    raw = _array(_field(doc, "arrows", pointer), f"{pointer}/arrows")
    for i, entry in enumerate(raw):
        p = f"{pointer}/arrows/{i}"
        _object(entry, p, {"id", "src", "tgt", "label"})
        aid = _integer(_field(entry, "id", p), f"{p}/id")
        src = _integer(_field(entry, "src", p), f"{p}/src")
        tgt = _integer(_field(entry, "tgt", p), f"{p}/tgt")
        label = _string(entry["label"], f"{p}/label") if "label" in entry else None
        if aid in seen:
            _fail(f"{p}/id", f"duplicate arrow id {aid}")
        seen.add(aid)
        if not 0 <= src < n:
            _fail(f"{p}/src", f"vertex {src} outside 0..{n - 1}")
        if not 0 <= tgt < n:
            _fail(f"{p}/tgt", f"vertex {tgt} outside 0..{n - 1}")
        arrows.append(Arrow(aid, src, tgt, label))
    return Quiver(n, arrows)


def same_quiver(q1: Quiver, q2: Quiver) -> bool:
    """Equality with ids and labels (stricter than adjacency equality)."""
    def key(q):
        return {a.id: (a.src, a.tgt, a.label) for a in q.arrows}
    return q1.n == q2.n and key(q1) == key(q2)


# ---------------------------------------------------------------------------
# walks and homotopies


def walk_to_json(w: Walk) -> dict:
    return {"base": w.base,
            "steps": [{"arrow": s.arrow, "sign": s.sign} for s in w.steps]}


def _steps_from_json(items, q: Quiver, pointer):
    steps = []
    for i, entry in enumerate(_array(items, pointer)):
        p = f"{pointer}/{i}"
        _object(entry, p, {"arrow", "sign"})
        aid = _integer(_field(entry, "arrow", p), f"{p}/arrow")
        sign = _integer(_field(entry, "sign", p), f"{p}/sign")
        if sign not in (1, -1):
            _fail(f"{p}/sign", "expected 1 or -1")
        if not q.has_arrow(aid):
            _fail(f"{p}/arrow", f"no arrow with id {aid}")
        steps.append(Step(aid, sign))
    return steps


def generator_from_json(items, q: Quiver, pointer: str = "") -> Walk:
    """A generator is a bare array of steps; its source is implied."""
    steps = _steps_from_json(items, q, pointer)
    if not steps:
        _fail(pointer, "a generator needs at least one step")
    a = q.arrow(steps[0].arrow)
    base = a.src if steps[0].sign > 0 else a.tgt
    try:
        w = Walk(q, base, steps)
    except ValueError as e:
        _fail(pointer, str(e))
    if not w.is_closed():
        _fail(pointer, "generator walk is not closed")
    return w


def homotopy_to_json(oracle) -> dict:
    if isinstance(oracle, TrivialOracle):
        return {"type": "trivial"}
    if isinstance(oracle, FullOracle):
        return {"type": "full"}
    if isinstance(oracle, AbelianQuotientOracle):
        return {"type": "abelian", "generators": _generators_json(oracle.generators)}
    if isinstance(oracle, GeneratedOracle):
        return {"type": "generated",
                "generators": _generators_json(oracle.generators),
                "search_bound": oracle.search_bound}
    if isinstance(oracle, CoveringOracle):
        return {"type": "cover", "cover": covering_to_json(oracle.covering)}
    raise ValueError(f"no JSON form for homotopy backend {type(oracle).__name__}")


def _generators_json(gens):
    return [[{"arrow": s.arrow, "sign": s.sign} for s in g.steps] for g in gens]


def homotopy_from_json(doc, q: Quiver, pointer: str = ""):
    """Build the homotopy oracle a document describes, over the quiver q.

    A "cover" homotopy carries its own base quiver, which must match q arrow
    for arrow.
    """
    _object(doc, pointer, {"type", "generators", "cover", "search_bound"})
    kind = _string(_field(doc, "type", pointer), f"{pointer}/type")
    fields = {"trivial": (), "full": (), "abelian": ("generators",),
              "generated": ("generators", "search_bound"),
              "cover": ("cover",)}
    if kind not in fields:
        _fail(f"{pointer}/type", f"unknown homotopy type {kind!r}")
    for key in ("generators", "cover", "search_bound"):
        if key in doc and key not in fields[kind]:
            _fail(f"{pointer}/{key}", f'not a field of a "{kind}" homotopy')
    if kind == "trivial":
        return TrivialOracle(q)
    if kind == "full":
        return FullOracle(q)
    if kind == "cover":
        c = covering_from_json(_field(doc, "cover", pointer), f"{pointer}/cover")
        if not same_quiver(c.base, q):
            _fail(f"{pointer}/cover/base", "covering base differs from the quiver")
        return CoveringOracle(c)
    raw = _array(_field(doc, "generators", pointer), f"{pointer}/generators")
    gens = [generator_from_json(item, q, f"{pointer}/generators/{i}")
            for i, item in enumerate(raw)]
    if kind == "abelian":
        return AbelianQuotientOracle(q, gens)
    bound = None
    if "search_bound" in doc:
        bound = _integer(doc["search_bound"], f"{pointer}/search_bound", low=1)
    return GeneratedOracle(q, gens, search_bound=bound)


# ---------------------------------------------------------------------------
# coverings


def covering_to_json(c: Covering) -> dict:
    return {"total": quiver_to_json(c.total),
            "base": quiver_to_json(c.base),
            "vmap": list(c.vertex_map),
            "amap": [[t, b] for t, b in sorted(c.arrow_map.items())]}


def covering_from_json(doc, pointer: str = "") -> Covering:
    """Parse a covering.  A `deck` block, when present, is verified to list
    genuine deck transformations and then dropped: the group is recomputed on
    demand by deck_transformations."""
    _object(doc, pointer, {"total", "base", "vmap", "amap", "deck"})
    total = quiver_from_json(_field(doc, "total", pointer), f"{pointer}/total")
    base = quiver_from_json(_field(doc, "base", pointer), f"{pointer}/base")
    raw_v = _array(_field(doc, "vmap", pointer), f"{pointer}/vmap")
    if len(raw_v) != total.n:
        _fail(f"{pointer}/vmap", f"expected {total.n} entries, got {len(raw_v)}")
    vmap = []
    for i, v in enumerate(raw_v):
        _integer(v, f"{pointer}/vmap/{i}")
        if not 0 <= v < base.n:
            _fail(f"{pointer}/vmap/{i}", f"vertex {v} outside 0..{base.n - 1}")
        vmap.append(v)
    amap = {}
    for i, entry in enumerate(_array(_field(doc, "amap", pointer), f"{pointer}/amap")):
        p = f"{pointer}/amap/{i}"
        pair = _array(entry, p)
        if len(pair) != 2:
            _fail(p, "expected a [total_id, base_id] pair")
        t = _integer(pair[0], f"{p}/0")
        b = _integer(pair[1], f"{p}/1")
        if not total.has_arrow(t):
            _fail(f"{p}/0", f"no total arrow with id {t}")
        if not base.has_arrow(b):
            _fail(f"{p}/1", f"no base arrow with id {b}")
        if t in amap:
            _fail(f"{p}/0", f"total arrow {t} mapped twice")
        amap[t] = b
    missing = sorted(a.id for a in total.arrows if a.id not in amap)
    if missing:
        _fail(f"{pointer}/amap", f"total arrows without images: {missing}")
    c = Covering(total, base, vmap, amap)
    if "deck" in doc:
        _check_deck(doc["deck"], c, f"{pointer}/deck")
    return c


def _check_deck(items, c: Covering, pointer):
    n = c.total.n
    for i, entry in enumerate(_array(items, pointer)):
        p = f"{pointer}/{i}"
        _object(entry, p, {"vperm", "aperm"})
        raw = _array(_field(entry, "vperm", p), f"{p}/vperm")
        vperm = [_integer(x, f"{p}/vperm/{j}") for j, x in enumerate(raw)]
        if sorted(vperm) != list(range(n)):
            _fail(f"{p}/vperm", f"not a permutation of 0..{n - 1}")
        if any(c.vertex_map[vperm[v]] != c.vertex_map[v] for v in range(n)):
            _fail(f"{p}/vperm", "does not respect the fibers")
        aperm = {}
        for j, pair_raw in enumerate(_array(_field(entry, "aperm", p), f"{p}/aperm")):
            pp = f"{p}/aperm/{j}"
            pair = _array(pair_raw, pp)
            if len(pair) != 2:
                _fail(pp, "expected an [id, image_id] pair")
            src_id = _integer(pair[0], f"{pp}/0")
            img_id = _integer(pair[1], f"{pp}/1")
            if not (c.total.has_arrow(src_id) and c.total.has_arrow(img_id)):
                _fail(pp, "ids must name total arrows")
            if src_id in aperm:
                _fail(f"{pp}/0", f"arrow {src_id} mapped twice")
            aperm[src_id] = img_id
        if len(aperm) != len(c.total.arrows) or len(set(aperm.values())) != len(aperm):
            _fail(f"{p}/aperm", "not a bijection on the total arrows")
        for a in c.total.arrows:
            img = c.total.arrow(aperm[a.id])
            if (img.src, img.tgt) != (vperm[a.src], vperm[a.tgt]):
                _fail(f"{p}/aperm", f"image of arrow {a.id} breaks incidence")
            if c.arrow_map[img.id] != c.arrow_map[a.id]:
                _fail(f"{p}/aperm", f"image of arrow {a.id} changes the projection")


# ---------------------------------------------------------------------------
# surfaces and triangulations


def surface_to_json(s: ColoredSurface) -> dict:
    return {"genus": s.genus, "boundaries": list(s.boundaries),
            "punctures": [{"color": c} for c in s.punctures]}


def surface_from_json(doc, pointer: str = "") -> ColoredSurface:
    _object(doc, pointer, {"genus", "boundaries", "punctures"})
    genus = _integer(_field(doc, "genus", pointer), f"{pointer}/genus", low=0)
    raw_b = _array(_field(doc, "boundaries", pointer), f"{pointer}/boundaries")
    bounds = tuple(_integer(x, f"{pointer}/boundaries/{i}", low=0)
                   for i, x in enumerate(raw_b))
    colors = []
    raw_p = _array(_field(doc, "punctures", pointer), f"{pointer}/punctures")
    for i, entry in enumerate(raw_p):
        p = f"{pointer}/punctures/{i}"
        _object(entry, p, {"color"})
        color = _string(_field(entry, "color", p), f"{p}/color")
        if color not in (COLOR_I, COLOR_II):
            _fail(f"{p}/color", 'expected "I" or "II"')
        colors.append(color)
    return ColoredSurface(genus, bounds, tuple(colors))


def _label(x, labels, pointer):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        _fail(pointer, "expected an arc (integer) or boundary (string) label")
    if x not in labels:
        _fail(pointer, f"unknown label {x!r}")
    return x


def triangulation_to_json(tt: TaggedTriangulation) -> dict:
    t = tt.triangulation
    ends = [[lab, *t.ends[lab]] for lab in (*t.arcs, *t.boundary)]
    return {
        "arcs": list(t.arcs),
        "boundary": list(t.boundary),
        "ends": ends,
        "triangles": [[[lab, o] for lab, o in tri] for tri in t.triangles],
        "punctures": [[pt, color] for pt, color in sorted(t.punctures.items())],
        "tags": [[pt, tag] for pt, tag in sorted(tt.tags.items())],
        "pieces": [{"kind": kind, "arcs": list(arcs),
                    "tags": {key: list(val) for key, val in sorted(extra.items())}}
                   for kind, arcs, extra in t.pieces()],
    }


def triangulation_from_json(doc, pointer: str = "") -> TaggedTriangulation:
    """The precise fields (ends, triangles, punctures, tags) rebuild the
    triangulation; `pieces` is a derived view and is ignored on input."""
    _object(doc, pointer, {"arcs", "boundary", "ends", "triangles",
                           "punctures", "tags", "pieces"})
    raw_a = _array(_field(doc, "arcs", pointer), f"{pointer}/arcs")
    arcs = [_integer(x, f"{pointer}/arcs/{i}") for i, x in enumerate(raw_a)]
    raw_b = _array(doc.get("boundary", []), f"{pointer}/boundary")
    boundary = [_string(x, f"{pointer}/boundary/{i}") for i, x in enumerate(raw_b)]
    labels = set(arcs) | set(boundary)
    ends = {}
    for i, entry in enumerate(_array(_field(doc, "ends", pointer), f"{pointer}/ends")):
        p = f"{pointer}/ends/{i}"
        triple = _array(entry, p)
        if len(triple) != 3:
            _fail(p, "expected [label, end0, end1]")
        lab = _label(triple[0], labels, f"{p}/0")
        if lab in ends:
            _fail(f"{p}/0", f"duplicate ends entry for {lab!r}")
        ends[lab] = (_string(triple[1], f"{p}/1"), _string(triple[2], f"{p}/2"))
    unplaced = sorted(str(lab) for lab in labels - set(ends))
    if unplaced:
        _fail(f"{pointer}/ends", f"labels without ends: {', '.join(unplaced)}")
    triangles = []
    raw_t = _array(_field(doc, "triangles", pointer), f"{pointer}/triangles")
    for i, tri_raw in enumerate(raw_t):
        p = f"{pointer}/triangles/{i}"
        tri = _array(tri_raw, p)
        if len(tri) != 3:
            _fail(p, "expected three [label, direction] sides")
        sides = []
        for j, side_raw in enumerate(tri):
            pp = f"{p}/{j}"
            side = _array(side_raw, pp)
            if len(side) != 2:
                _fail(pp, "expected a [label, direction] pair")
            lab = _label(side[0], labels, f"{pp}/0")
            o = _integer(side[1], f"{pp}/1")
            if o not in (0, 1):
                _fail(f"{pp}/1", "expected 0 or 1")
            sides.append((lab, o))
        triangles.append(sides)
    punctures = {}
    for i, entry in enumerate(_array(doc.get("punctures", []), f"{pointer}/punctures")):
        p = f"{pointer}/punctures/{i}"
        pair = _array(entry, p)
        if len(pair) != 2:
            _fail(p, "expected a [point, color] pair")
        pt = _string(pair[0], f"{p}/0")
        color = _string(pair[1], f"{p}/1")
        if color not in (COLOR_I, COLOR_II):
            _fail(f"{p}/1", 'expected "I" or "II"')
        if pt in punctures:
            _fail(f"{p}/0", f"puncture {pt!r} listed twice")
        punctures[pt] = color
    try:
        t = Triangulation(arcs, boundary, ends, triangles, punctures)
    except ValueError as e:
        _fail(pointer, str(e))
    tags = None
    if "tags" in doc:
        tags = {}
        for i, entry in enumerate(_array(doc["tags"], f"{pointer}/tags")):
            p = f"{pointer}/tags/{i}"
            pair = _array(entry, p)
            if len(pair) != 2:
                _fail(p, "expected a [point, tag] pair")
            pt = _string(pair[0], f"{p}/0")
            tag = _string(pair[1], f"{p}/1")
            if tag not in (PLAIN, NOTCHED):
                _fail(f"{p}/1", 'expected "plain" or "notched"')
            if pt in tags:
                _fail(f"{p}/0", f"point {pt!r} tagged twice")
            tags[pt] = tag
    try:
        return TaggedTriangulation(t, tags)
    except ValueError as e:
        _fail(f"{pointer}/tags", str(e))


# ---------------------------------------------------------------------------
# seeds


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def monomial_to_string(exps, names) -> str:
    factors = [names[j] if k == 1 else f"{names[j]}^{k}"
               for j, k in enumerate(exps) if k]
    return "*".join(factors) if factors else "1"


def monomial_from_string(text: str, names, pointer: str = "") -> tuple:
    vec = [0] * len(names)
    body = text.strip()
    if body == "1":
        return tuple(vec)
    if not body:
        _fail(pointer, "empty monomial")
    for factor in body.split("*"):
        name, caret, exp = factor.strip().partition("^")
        if name not in names:
            _fail(pointer, f"unknown generator {name!r} in {text!r}")
        k = 1
        if caret:
            try:
                k = int(exp)
            except ValueError:
                _fail(pointer, f"bad exponent {exp!r} in {text!r}")
        vec[names.index(name)] += k
    return tuple(vec)


def seed_to_json(s: Seed) -> dict:
    """Initial seeds only: a mutated seed is reproduced by replaying its log."""
    if not at_basepoint(s):
        raise ValueError("only basepoint seeds have a JSON form")
    doc = {"quiver": quiver_to_json(s.tracked.base),
           "homotopy": homotopy_to_json(s.tracked.oracle)}
    sf = s.semifield
    principal = (is_principal(s)
                 and s.coeffs == tuple(sf.generator(j) for j in range(s.n)))
    doc["principal"] = principal
    if not principal:
        if isinstance(sf, TropicalSemifield):
            names = [f"y{j}" for j in range(sf.size)]
            doc["semifield"] = {"type": "tropical", "gens": names}
        else:
            names = []
            doc["semifield"] = {"type": "trivial"}
        doc["coeffs"] = [monomial_to_string(c, names) for c in s.coeffs]
    return doc


def seed_from_json(doc, pointer: str = "") -> Seed:
    _object(doc, pointer, {"quiver", "homotopy", "semifield", "coeffs",
                           "principal"})
    q = quiver_from_json(_field(doc, "quiver", pointer), f"{pointer}/quiver")
    oracle = homotopy_from_json(_field(doc, "homotopy", pointer), q,
                                f"{pointer}/homotopy")
    principal = doc.get("principal", False)
    if not isinstance(principal, bool):
        _fail(f"{pointer}/principal", "expected a boolean")
    if principal:
        for key in ("semifield", "coeffs"):
            if key in doc:
                _fail(f"{pointer}/{key}", "a principal seed fixes this field")
        return principal_seed(q, oracle)
    names = []
    sf = TrivialSemifield()
    if "semifield" in doc:
        block = _object(doc["semifield"], f"{pointer}/semifield", {"type", "gens"})
        kind = _string(_field(block, "type", f"{pointer}/semifield"),
                       f"{pointer}/semifield/type")
        if kind == "trivial":
            if "gens" in block:
                _fail(f"{pointer}/semifield/gens",
                      'not a field of a "trivial" semifield')
        elif kind == "tropical":
            raw = _array(_field(block, "gens", f"{pointer}/semifield"),
                         f"{pointer}/semifield/gens")
            for i, g in enumerate(raw):
                name = _string(g, f"{pointer}/semifield/gens/{i}")
                if not _NAME_RE.match(name):
                    _fail(f"{pointer}/semifield/gens/{i}",
                          f"bad generator name {name!r}")
                if name in names:
                    _fail(f"{pointer}/semifield/gens/{i}",
                          f"duplicate generator {name!r}")
                names.append(name)
            sf = TropicalSemifield(len(names))
        else:
            _fail(f"{pointer}/semifield/type", f"unknown semifield type {kind!r}")
    coeffs = None
    if "coeffs" in doc:
        raw = _array(doc["coeffs"], f"{pointer}/coeffs")
        if len(raw) != q.n:
            _fail(f"{pointer}/coeffs", f"expected {q.n} entries, got {len(raw)}")
        coeffs = tuple(
            monomial_from_string(_string(x, f"{pointer}/coeffs/{i}"), names,
                                 f"{pointer}/coeffs/{i}")
            for i, x in enumerate(raw))
    return initial_seed(q, oracle, sf, coeffs)


def seed_variable_names(s: Seed) -> list:
    """The x/y roster behind a seed's polynomial exponent vectors."""
    return [f"x{i}" for i in range(s.n)] + \
           [f"y{j}" for j in range(s.semifield.size)]


def poly_to_string(p: MultiPoly, names) -> str:
    """Canonical text: terms in descending lexicographic exponent order."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.items():
        factors = [names[i] if k == 1 else f"{names[i]}^{k}"
                   for i, k in enumerate(e) if k]
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        elif c == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts)


def rational_to_string(r: RationalFn, names) -> str:
    num = poly_to_string(r.num, names)
    if r.den.is_one():
        return num
    return f"({num})/({poly_to_string(r.den, names)})"


# ---------------------------------------------------------------------------
# mutation results (output only)


def membership_to_json(m: Membership) -> dict:
    doc = {"verdict": m.verdict}
    if m.witness is not None:
        doc["witness"] = _witness_json(m.witness)
    if m.certificate is not None:
        doc["certificate"] = m.certificate
    return doc


def _witness_json(w):
    if isinstance(w, Walk):
        return walk_to_json(w)
    if isinstance(w, (tuple, list)):
        return [_witness_json(x) for x in w]
    return w


def tracked_to_json(t) -> dict:
    """Mutation result: the current quiver, the base word behind every arrow,
    and the deletion log with its membership witnesses."""
    return {
        "base": quiver_to_json(t.base),
        "quiver": quiver_to_json(t.current),
        "log": list(t.log),
        "words": [{"arrow": aid, **walk_to_json(w)}
                  for aid, w in sorted(t.arrow_word.items())],
        "deletions": [
            {"pair": list(r.pair),
             "forward": r.forward.id, "backward": r.backward.id,
             "forward_label": r.forward.name(),
             "backward_label": r.backward.name(),
             "witness": membership_to_json(r.witness)}
            for r in t.deletions],
    }


# ---------------------------------------------------------------------------
# DOT


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def quiver_to_dot(q: Quiver, name: str = "quiver") -> str:
    """One edge per arrow, labeled by the arrow's name; canonical order."""
    lines = [f"digraph {name} {{"]
    for v in range(q.n):
        lines.append(f"  {v};")
    for a in sorted(q.arrows, key=lambda a: (a.src, a.tgt, a.id)):
        lines.append(f"  {a.src} -> {a.tgt} [label={_dot_quote(a.name())}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def flip_graph_to_dot(fg: FlipGraph, name: str = "flips") -> str:
    lines = [f"graph {name} {{"]
    for i in range(len(fg.nodes)):
        lines.append(f"  {i};")
    for i, j in fg.edges:
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
