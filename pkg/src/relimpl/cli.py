"""Command-line front end: tables, classification, the decide pipeline, exports."""

from __future__ import annotations

import sys
import time
from pathlib import Path

import click
import numba
import numpy as np

from . import counterexamples as cex
from . import inference, minimizer, prover
from .equivalence import FALSE, TRUE, classes, final_classes, refine
from .properties import prop as basic_prop
from .relation import census_closed_sets, composition_table, left_inverse_table, right_inverse_table
from .store import (
    VALID,
    ConsistencyError,
    ParseError,
    Store,
    decode,
    decode_index,
    describe,
    encode,
    encode_index,
    load,
    save,
    short_name,
)

EXIT_CONFLICT = 2
EXIT_INCOMPLETE = 3


def _echo_lines(lines):
    for line in lines:
        click.echo(line)


def _code(value: str) -> str:
    try:
        decode_index(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    return value


def _open_store(path: str | None) -> Store:
    if path and Path(path).exists():
        return load(path)
    return Store()


@click.group()
@click.option("--threads", type=int, default=None, help="Worker threads for the numeric kernels.")
def main(threads):
    """Three-atom implications between lifted relation properties."""
    if threads:
        numba.set_num_threads(threads)


@main.command("ops-tables")
def ops_tables():
    """Composition and inverse tables of the 16 operations, and the closed-set census."""
    click.echo("composition p∘q (row p, column q)")
    click.echo(composition_table())
    click.echo("\nleft inverses: x with x∘q = p")
    click.echo(left_inverse_table())
    click.echo("\nright inverses: x with p∘x = q")
    click.echo(right_inverse_table())
    click.echo("")
    _echo_lines(census_closed_sets().lines())


@main.command()
@click.option("--max-n", type=int, default=5, show_default=True)
@click.option("--mode", type=click.Choice(["exhaustive", "sampled"]), default="exhaustive")
@click.option("--samples", type=int, default=1_000_000)
@click.option("--seed", type=int, default=0)
def classify(max_n, mode, samples, seed):
    """Partition the 384 lifted properties by their behaviour on relations of one size."""
    t0 = time.time()
    part = refine(max_n, mode, samples, seed)
    click.echo(f"blocks={len(part)} n={max_n} mode={mode} visited={part.visited} "
               f"seconds={time.time() - t0:.1f}")
    _echo_lines(part.chains())
    if mode == "exhaustive" and max_n == 5:
        cls = final_classes(part)
        click.echo(f"\nfinal classes={len(cls)}")
        click.echo(cls.matrix())


def decide_store(store: Store, max_n: int = 5, strategy: str = "breadth", path: str | None = None,
                 log=click.echo) -> Store:
    """initialize, manual proofs, axioms, closure, sweep, catalogs, negative closure.

    Every stage is idempotent, so re-running on a saved store resumes.
    """
    stages = [
        ("initialize", lambda: inference.initialize(store)),
        ("manual proofs", lambda: prover.ingest_manual(store)),
        ("axioms", lambda: minimizer.load_axioms(store)),
        ("positive closure", lambda: inference.close_positive(store, strategy)),
        (f"sweep n={max_n}", lambda: cex.sweep(store, max_n)),
        ("witness catalogs", lambda: cex.apply_catalogs(store)),
        ("negative closure", lambda: inference.close_negative(store, strategy)),
    ]
    for name, run in stages:
        t0 = time.time()
        added = run()
        log(f"{name}: +{added} ({time.time() - t0:.1f}s)")
        if path:
            save(store, path)
    return store


@main.command()
@click.option("--store", "store_path", type=click.Path(dir_okay=False), default=None)
@click.option("--max-n", type=int, default=5, show_default=True)
@click.option("--strategy", type=click.Choice(inference.STRATEGIES), default="breadth")
@click.option("--single-thread", is_flag=True, help="Pin the kernels to one thread.")
def decide(store_path, max_n, strategy, single_thread):
    """Run the full pipeline and report the census."""
    if single_thread:
        numba.set_num_threads(1)
    try:
        store = decide_store(_open_store(store_path), max_n, strategy, store_path)
    except ConsistencyError as exc:
        click.echo(f"consistency error: {exc}", err=True)
        sys.exit(EXIT_CONFLICT)
    c = store.census()
    click.echo(f"valid={c['valid']} invalid={c['invalid']} unknown={c['unknown']}")
    if c["unknown"]:
        for idx in np.flatnonzero(store.value == 0)[:50]:
            click.echo(f"  {encode_index(int(idx))}  {describe(int(idx))}")
        sys.exit(EXIT_INCOMPLETE)


@main.command("sweep")
@click.option("--max-n", type=int, default=5, show_default=True)
@click.option("--min-n", type=int, default=None, help="Smallest domain; defaults to --max-n.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def sweep_cmd(max_n, min_n, out):
    """Mark every implication refuted by some relation and write them in store format."""
    store = Store()
    added = cex.sweep(store, max_n, min_n)
    save(store, out)
    click.echo(f"refuted={added}")


@main.command()
@click.argument("code", callback=lambda ctx, p, v: _code(v))
@click.option("--max-n", type=int, default=5, show_default=True)
def search(code, max_n):
    """First relation (by size, then packed word) refuting CODE."""
    w = cex.search(code, max_n)
    if w is None:
        click.echo(f"{code}: no counter-example up to n={max_n}")
        return
    click.echo(f"n={w.relation.n} {w.relation}")


@main.command("emit-undecided")
@click.option("--store", "store_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--min-card", type=int, default=1, show_default=True)
def emit_undecided(store_path, out, min_card):
    """Write one prover problem per undecided cell."""
    paths = prover.emit_undecided(load(store_path), out, min_card)
    click.echo(f"problems={len(paths)}")


@main.command()
@click.argument("results", type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_path", type=click.Path(dir_okay=False), required=True)
def ingest(results, store_path):
    """Record proved verdicts ("code verdict minCard" lines) in the store."""
    store = _open_store(store_path)
    try:
        added = prover.ingest(store, prover.parse_results(Path(results).read_text()))
    except ConsistencyError as exc:
        click.echo(f"consistency error: {exc}", err=True)
        sys.exit(EXIT_CONFLICT)
    save(store, store_path)
    click.echo(f"proved={added}")


def _valid_set() -> np.ndarray:
    store = Store()
    inference.initialize(store)
    minimizer.load_axioms(store)
    inference.close_positive(store)
    return store.value == VALID


@main.command()
@click.option("--kernel", type=click.Choice(["valid", "axioms"]), default="valid",
              help="Start from every valid cell or from the shipped axiom table.")
@click.option("--greedy", is_flag=True, help="Finish with one-by-one removal (slow).")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def minimize(kernel, greedy, out):
    """Reduce a kernel to an axiom set under the fixed catalog of orders."""
    m = minimizer.Minimizer(_valid_set())
    if kernel == "valid":
        start = np.flatnonzero(m.valid & ~m.init)
    else:
        start = [row.index for row in minimizer.published_axioms()]
    result = m.iterate(start)
    click.echo("sizes: " + " -> ".join(map(str, result.trajectory)))
    if greedy:
        result = m.greedy_drop(result.members)
        click.echo(f"after greedy drop: {len(result)}")
    last = minimizer.DEFAULT_ORDERS[-1]
    click.echo(f"axioms={len(result)} (published table: 124) derives_all={m.derives_all(result.members)} "
               f"minimal={m.is_minimal(result.members, last)}")
    click.echo(minimizer.render_axioms(result.members))
    if out:
        store = Store()
        for c in result.members:
            store.leaf(c, VALID, minimizer.AXIOM, "")
        save(store, out)


@main.command("verify-axioms")
@click.option("--max-n", type=int, default=5, show_default=True)
def verify_axioms(max_n):
    """Check the shipped axiom table for soundness and completeness."""
    rep = minimizer.verify_published_axioms(max_n)
    for row in minimizer.published_axioms():
        hits = rep.thresholds[row.code]
        if hits:
            click.echo(f"{row.code} min={row.min_card} refuted at n={','.join(map(str, hits))}")
    click.echo(f"unsound={len(rep.unsound)} valid={rep.valid_count}")
    if rep.unsound:
        for code, n in rep.unsound:
            click.echo(f"  {code} refuted at n={n}")
        sys.exit(1)


@main.command()
@click.argument("code", callback=lambda ctx, p, v: _code(v))
@click.option("--long", "long_names", is_flag=True)
def resolve(code, long_names):
    """Print the implication behind a base-27 code."""
    i, j, k = decode(code)
    click.echo(f"{describe(code, long=long_names)}  [{i}][{j}][{k}]")


@main.command()
@click.argument("lp1")
@click.argument("lp2")
@click.argument("lp3")
def rank(lp1, lp2, lp3):
    """Code of "LP1 ∧ LP2 → LP3"; + and - name the constant classes."""
    cls = classes()

    def r(text):
        if text in ("+", "-"):
            return TRUE if text == "+" else FALSE
        try:
            return cls.rank_of(text)
        except ValueError as exc:
            raise click.BadParameter(str(exc)) from None

    click.echo(encode(r(lp1), r(lp2), r(lp3)))


@main.command()
@click.argument("code", callback=lambda ctx, p, v: _code(v))
@click.option("--store", "store_path", type=click.Path(dir_okay=False), default=None,
              help="Saved store; without it the pipeline runs in memory.")
@click.option("--strategy", type=click.Choice(inference.STRATEGIES), default="breadth")
def justify(code, store_path, strategy):
    """Print the proof or disproof tree of CODE."""
    if store_path and Path(store_path).exists():
        store = load(store_path)
    else:
        store = decide_store(Store(), strategy=strategy, log=lambda _: None)
    tree = inference.justify(store, code)
    if tree is None:
        click.echo(f"{code}: undecided")
        return
    click.echo(str(tree))


def hasse_edges(store: Store, touching=None) -> list[tuple[int, int]]:
    """Valid single-antecedent implications x → y, transitively reduced.

    touching keeps only the edges with an endpoint in that set of classes.
    """
    n = len(classes())
    nodes = [x for x in range(n) if x not in (TRUE, FALSE)]
    imp = {
        (x, y)
        for x in nodes
        for y in nodes
        if x != y and store.value[(x * n + x) * n + y] == VALID
    }
    keep = set(touching) if touching is not None else set(nodes)
    return sorted(
        (x, y)
        for x, y in imp
        if (x in keep or y in keep) and not any((x, z) in imp and (z, y) in imp for z in nodes)
    )


def property_nodes(name: str) -> list[int]:
    """Classes with a member that lifts the named basic property."""
    p = basic_prop(name).index
    return [c.rank for c in classes().classes if any(m.prop == p for m in c.members)]


def inconsistency_edges(store: Store) -> list[tuple[int, int]]:
    """Pairs whose conjunction implies the "-" class."""
    n = len(classes())
    return [
        (x, y)
        for x in range(n)
        for y in range(x, n)
        if FALSE not in (x, y) and store.value[(x * n + y) * n + FALSE] == VALID
    ]


def to_dot(name: str, edges, directed: bool = True) -> str:
    arrow = "->" if directed else "--"
    kind = "digraph" if directed else "graph"
    lines = [f"{kind} {name} {{"]
    for x, y in edges:
        lines.append(f'  "{short_name(x)}" {arrow} "{short_name(y)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


@main.command("export-dot")
@click.option("--store", "store_path", type=click.Path(dir_okay=False), default=None)
@click.option("--kind", type=click.Choice(["hasse", "inconsistency"]), default="hasse")
@click.option("--prop", default=None, help="Keep only edges touching this basic property.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def export_dot(store_path, kind, prop, out):
    """Implication (Hasse) diagram or inconsistency graph in DOT text."""
    if store_path and Path(store_path).exists():
        store = load(store_path)
    else:
        store = decide_store(Store(), log=lambda _: None)
    if kind == "hasse":
        try:
            nodes = property_nodes(prop) if prop else None
        except ValueError as exc:
            raise click.BadParameter(str(exc)) from None
        text = to_dot("implications", hasse_edges(store, nodes))
    else:
        text = to_dot("inconsistent", inconsistency_edges(store), directed=False)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("store-census")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def store_census(path):
    """Counts of a saved store."""
    try:
        store = load(path)
    except (ParseError, ConsistencyError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFLICT)
    c = store.census()
    click.echo(f"valid={c['valid']} invalid={c['invalid']} unknown={c['unknown']}")


if __name__ == "__main__":
    main()
