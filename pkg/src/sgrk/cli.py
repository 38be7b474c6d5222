"""``sgrk`` command line.

Exit codes: 0 realizable (or all checks passed), 1 unrealizable (or a check
failed), 2 usage, parse, validation or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .dd import BDD
from .errors import SGRKError
from .spec import SpecText, parse_spec, parse_spec_text, print_spec

SCHEMA = "sgrk-report-1"
EXIT_OK, EXIT_NO, EXIT_ERR = 0, 1, 2


class UsageError(SGRKError):
    pass


def default_seed() -> int:
    raw = os.environ.get("SGRK_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SGRK_SEED must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror}") from None


def _load_game(path: str, reorder: bool):
    bdd = BDD()
    game = parse_spec(_read(path), bdd=bdd)
    if reorder:
        bdd.reorder()
    return game


class Reporter:
    """Collects one run's facts and prints them as text or one JSON object."""

    def __init__(self, args, command: str):
        self.json = getattr(args, "json", False)
        seed = getattr(args, "seed", None)
        self.fields: Dict[str, object] = {"schema": SCHEMA, "command": command,
                                          "seed": default_seed() if seed is None else seed}
        self.lines: List[str] = []
        self.t0 = time.perf_counter()

    def set(self, **kw) -> None:
        self.fields.update(kw)

    def say(self, line: str) -> None:
        self.lines.append(line)

    def emit(self) -> None:
        self.fields["wall_time"] = round(time.perf_counter() - self.t0, 6)
        if self.json:
            sys.stdout.write(json.dumps(self.fields, sort_keys=True) + "\n")
        else:
            for line in self.lines:
                print(line)


# ----------------------------------------------------------------------
def cmd_check(args) -> int:
    from .grk import solve

    rep = Reporter(args, "check")
    game = _load_game(args.spec, args.reorder)
    res = solve(game, synthesize=False)
    rep.set(spec=args.spec, realizable=res.realizable, N=game.N, phi=game.condition.size,
            ops_used=res.ops, iterations=res.iterations)
    rep.say(f"{'realizable' if res.realizable else 'unrealizable'}  N={game.N}  "
            f"|phi|={game.condition.size}  ops={res.ops}  iterations={res.iterations}")
    rep.emit()
    return EXIT_OK if res.realizable else EXIT_NO


def cmd_synth(args) -> int:
    from .grk import export_stratjson, solve, write_stratjson
    from .errors import ExportError

    if not args.output:
        raise UsageError("synth needs an output path (-o)")
    rep = Reporter(args, "synth")
    game = _load_game(args.spec, args.reorder)
    bdd = game.bdd
    g = game.structure
    res = solve(game, synthesize=True)
    rep.set(spec=args.spec, realizable=res.realizable, N=game.N, phi=game.condition.size,
            ops_used=res.ops, iterations=res.iterations)
    if not res.realizable:
        env_states = bdd.sat_count(bdd.negate(res.win), g.X)
        rep.set(env_winning=env_states)
        rep.say(f"unrealizable: the environment wins from {env_states} of {game.N} states")
        rep.emit()
        return EXIT_NO
    ctrl = res.controller
    if args.dump_dd:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        roots = {"win": res.win, "acc": res.acc.acc, "fb": res.solution.fb}
        roots.update({f"travel{j}": r for j, r in enumerate(ctrl.travel.moves)})
        files = []
        for name, f in roots.items():
            p = out / f"{name}.dot"
            p.write_text(bdd.to_dot({name: f}))
            files.append(p.name)
        rep.set(dd_files=files)
        rep.say(f"realizable; wrote {len(files)} diagram files to {out}")
    else:
        try:
            table = export_stratjson(ctrl)
        except ExportError as e:
            raise UsageError(str(e)) from None
        _write(args.output, write_stratjson(table))
        rep.set(rows=len(table.rows), mem_bound=table.mem_bound)
        rep.say(f"realizable; wrote {len(table.rows)} strategy rows to {args.output}")
    rep.emit()
    return EXIT_OK


def _legal_inputs(game, state: str) -> List[str]:
    g = game.structure
    bdd = g.bdd
    fix = {n: b == "1" for n, b in zip(g.X, state)}
    env = bdd.restrict(g.rho_i, fix)
    return ["".join("1" if a[v + "'"] else "0" for v in g.inputs)
            for a in bdd.enumerate(env, g.Ip, limit=1 << 24)]


def _legal_output(game, state: str, inp: str, out: str) -> bool:
    g = game.structure
    vals = {n: b == "1" for n, b in zip(g.X, state)}
    vals.update({v + "'": b == "1" for v, b in zip(g.inputs, inp)})
    vals.update({v + "'": b == "1" for v, b in zip(g.outputs, out)})
    return g.bdd.evaluate(g.rho_o, {k: vals[k] for k in g.bdd.support(g.rho_o)})


def cmd_simulate(args) -> int:
    from .errors import ControllerError
    from .grk import read_stratjson

    rep = Reporter(args, "simulate")
    game = _load_game(args.spec, False)
    g = game.structure
    bdd = g.bdd
    table = read_stratjson(_read(args.strategy))
    if table.inputs != list(g.inputs) or table.outputs != list(g.outputs):
        raise UsageError("strategy variables do not match the specification")
    rng = np.random.default_rng(args.seed)
    script: List[str] = []
    if args.env == "script":
        if not args.script:
            raise UsageError("--env script needs --script FILE")
        script = [ln.strip() for ln in _read(args.script).splitlines() if ln.strip()]
        if not script:
            raise UsageError("script file has no inputs")
    gars = [(bdd.to_table(x, g.outputs)) for x in game.condition.guarantee_list()]

    def pick(options: List[str], k: int, state: Optional[str], mem: int) -> str:
        if args.env == "script":
            if k >= len(script):
                raise UsageError(f"script ended after {k} inputs")
            if script[k] not in options:
                raise ControllerError(f"scripted input {script[k]} is illegal at step {k}")
            return script[k]
        if args.env == "adversarial" and state is not None:
            scores = []
            for i in options:
                try:
                    o, _ = table.lookup(mem, state, i)
                    scores.append(sum(int(t[int(o, 2)]) for t in gars))
                except ControllerError:
                    scores.append(-1)
            best = min(scores)
            options = [i for i, s in zip(options, scores) if s == best]
        return options[int(rng.integers(0, len(options)))]

    init_inputs = [i for i, _ in table.initial]
    trace = []
    violation = None
    try:
        if not init_inputs:
            raise ControllerError("strategy lists no initial inputs")
        i0 = pick(init_inputs, 0, None, 0)
        state, mem = i0 + table.initial_output(i0), 0
        if not bdd.evaluate(g.theta_o, {n: b == "1" for n, b in zip(g.outputs, state[len(g.inputs):])}):
            raise ControllerError(f"initial output {state[len(g.inputs):]} violates INIT_SYS")
        trace.append((0, state, mem))
        k0 = 1 if args.env == "script" else 0
        steps = min(args.steps, len(script) - 1) if script else args.steps
        for step in range(1, steps + 1):
            inp = pick(_legal_inputs(game, state), step - 1 + k0, state, mem)
            out, mem2 = table.lookup(mem, state, inp)
            if not _legal_output(game, state, inp, out):
                raise ControllerError(f"step {step}: output {out} is illegal after input {inp}")
            state, mem = inp + out, mem2
            trace.append((step, state, mem))
    except ControllerError as e:
        violation = str(e)
    nI = len(g.inputs)
    for step, state, mem in trace:
        rep.say(f"{step:5d}  in={state[:nI]}  out={state[nI:]}  mem={mem}")
    if violation:
        rep.say("violation: " + violation)
    rep.set(spec=args.spec, steps=len(trace) - 1, violation=violation,
            trace=[{"step": s, "state": st, "mem": m} for s, st, m in trace])
    rep.emit()
    return EXIT_NO if violation else EXIT_OK


def _suite_one(job: Tuple[str, int]) -> Tuple[str, int, bool, List[str], int, bool]:
    from .bench import gen_random_grk, gen_random_weak_buchi
    from .oracle import crosscheck_grk, crosscheck_weak_buchi

    kind, seed = job
    if kind == "grk":
        r = crosscheck_grk(gen_random_grk(seed))
    else:
        r = crosscheck_weak_buchi(*gen_random_weak_buchi(seed))
    return kind, seed, r.ok, r.failures(), r.n_states, r.realizable


def run_suite(kinds: Sequence[str], seed: int, count: int, jobs: int = 1):
    """Cross-check ``count`` random instances of each kind; results in seed order."""
    work = [(k, seed + j) for k in kinds for j in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_suite_one, work, chunksize=8))
    return [_suite_one(w) for w in work]


def cmd_oracle(args) -> int:
    from .oracle import crosscheck_grk

    rep = Reporter(args, "oracle")
    if args.spec:
        game = _load_game(args.spec, False)
        r = crosscheck_grk(game)
        rep.set(spec=args.spec, realizable=r.realizable, N=game.N, win=r.win_size, agree=r.ok,
                checks={k: v.ok for k, v in r.checks.items()}, failures=r.failures())
        rep.say(f"{'agree' if r.ok else 'DISAGREE'}  realizable={r.realizable}  N={game.N}  "
                f"|W|={r.win_size}")
        for k, v in r.checks.items():
            rep.say(f"  {k:12s} {'ok' if v.ok else 'FAIL'} {v.message}")
        rep.emit()
        return EXIT_OK if r.ok else EXIT_NO
    kinds = ["grk", "weak"] if args.kind == "both" else [args.kind]
    results = run_suite(kinds, args.seed, args.count, args.jobs)
    bad = [(k, s, f) for k, s, ok, f, _, _ in results if not ok]
    rep.set(count=len(results), disagreements=len(bad),
            realizable=sum(1 for *_, real in results if real),
            failures=[{"kind": k, "seed": s, "why": f} for k, s, f in bad])
    rep.say(f"{len(results) - len(bad)}/{len(results)} random instances agree")
    for k, s, f in bad:
        rep.say(f"  {k} seed={s}: {'; '.join(f)}")
    rep.emit()
    return EXIT_NO if bad else EXIT_OK


def cmd_bench(args) -> int:
    from .bench import generate

    try:
        spec = generate(args.family, args.n, args.m)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _write(args.output, print_spec(spec))
    return EXIT_OK


def cmd_export_ltl(args) -> int:
    from .ltl import export_ltl

    spec = parse_spec_text(_read(args.spec))
    spec.build()
    _write(args.output, export_ltl(spec))
    return EXIT_OK


def cmd_adapter(args) -> int:
    from .adapters import assemble_adapter, project, read_tx, write_tx
    from .grk import solve

    rep = Reporter(args, "adapter")
    target = read_tx(_read(args.target))
    adaptee = read_tx(_read(args.adaptee))
    base = parse_spec_text(_read(args.grk))
    ins, outs = project(target), project(adaptee)
    if ins.width != len(base.inputs) or outs.width != len(base.outputs):
        raise UsageError("label widths of the transducers do not match the declared variables")
    spec = SpecText(base.inputs, base.outputs, ins.init_formula(base.inputs),
                    outs.init_formula(base.outputs), ins.trans_formula(base.inputs),
                    outs.trans_formula(base.outputs), base.grk, base.comment)
    game = spec.build()
    res = solve(game)
    rep.set(realizable=res.realizable, N=game.N, phi=game.condition.size, ops_used=res.ops,
            iterations=res.iterations, collisions=ins.collisions + outs.collisions)
    for c in ins.collisions + outs.collisions:
        rep.say("note: projection merged states: " + c)
    if not res.realizable:
        rep.say("unrealizable: no adapter exists for this condition")
        rep.emit()
        return EXIT_NO
    adapter = assemble_adapter(target, adaptee, res.controller)
    _write(args.output, write_tx(adapter))
    rep.set(adapter_states=len(adapter.states))
    rep.say(f"realizable; adapter with {len(adapter.states)} states written to {args.output}")
    rep.emit()
    return EXIT_OK


# ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sgrk", description="Separated GR(k) synthesis toolkit.")
    p.add_argument("--version", action="version", version=f"sgrk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("--json", action="store_true", help="print one JSON report on stdout")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="random seed (default $SGRK_SEED or 0)")

    sp = sub.add_parser("check", help="decide realizability")
    sp.add_argument("spec", help="specification file, or - for stdin")
    sp.add_argument("--reorder", action="store_true", help="sift variable blocks after parsing")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("synth", help="synthesize and export a controller")
    sp.add_argument("spec")
    sp.add_argument("-o", "--output", help="stratjson file, or a directory with --dump-dd")
    sp.add_argument("--dump-dd", action="store_true", help="write Graphviz diagrams instead of rows")
    sp.add_argument("--reorder", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("simulate", help="replay a strategy file against an environment")
    sp.add_argument("spec")
    sp.add_argument("strategy")
    sp.add_argument("--env", choices=["random", "adversarial", "script"], default="random")
    sp.add_argument("--script", help="file with one input bitstring per line (first line initial)")
    sp.add_argument("--steps", type=int, default=100)
    common(sp, seed=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("oracle", help="cross-check against explicit enumeration")
    sp.add_argument("spec", nargs="?", help="specification; omit to run the random suite")
    sp.add_argument("--count", type=int, default=100, help="random instances per kind")
    sp.add_argument("--kind", choices=["grk", "weak", "both"], default="both")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes for the random suite")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("bench", help="emit a benchmark specification")
    sp.add_argument("family", choices=["multimode", "cleaning", "railways"])
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-m", type=int, default=None)
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("export-ltl", help="write the strict-semantics LTL formula")
    sp.add_argument("spec")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_export_ltl)

    sp = sub.add_parser("adapter", help="assemble an adapter from two transducers")
    sp.add_argument("--target", required=True)
    sp.add_argument("--adaptee", required=True)
    sp.add_argument("--grk", required=True, help="spec supplying variable names and GRK blocks")
    sp.add_argument("-o", "--output", default="-")
    common(sp)
    sp.set_defaults(func=cmd_adapter)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERR if e.code not in (0, None) else EXIT_OK
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except SGRKError as e:
        if getattr(args, "json", False):
            sys.stdout.write(json.dumps({"schema": SCHEMA, "command": args.command,
                                         "error": type(e).__name__, "message": str(e)},
                                        sort_keys=True) + "\n")
        print(f"sgrk: error: {e}", file=sys.stderr)
        return EXIT_ERR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
