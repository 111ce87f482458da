"""Command-line frontend: construct, compute, verify, export.

Every run echoes its effective seed and tolerances on stderr so results can
be replayed.  Exit codes: 0 success, 1 a verification failed (a residual
exceeded its tolerance, a certificate did not hold), 2 usage or ingestion
errors.  With --json-errors the failure reason is also written to stderr as
{"error": {"kind": ..., "detail": ...}}.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import chartab, loopcore, permgroup, scheme as scheme_mod, zorn
from .config import (DEFAULT_SEED, DEFAULT_TOL_COMPARE, DEFAULT_TOL_EIGEN,
                     OUTPUT_FORMATS, RunConfig, element_cap_default)
from .errors import (CapExceeded, CertificationFailed, DegenerateCombination,
                     DivisionByZero, EigensolverFailure, IndexOutOfRange,
                     InvalidFusion, MismatchWithOrbitalTable, NonCommutative,
                     NonPositiveMultiplicity, NotAScheme, NotEnumerated,
                     NotGroupScheme, NotMultiplicityFree, NotSubgroup,
                     NotTransitive, ParseError, SingularMatrix, SpecMismatch,
                     UnsupportedField, UnsupportedQ)

# failures of a computation or certificate -> exit 1
VERIFICATION_ERRORS = (NotAScheme, InvalidFusion, NonCommutative,
                       DegenerateCombination, EigensolverFailure,
                       NonPositiveMultiplicity, NotGroupScheme,
                       NotMultiplicityFree, MismatchWithOrbitalTable,
                       CertificationFailed)
# bad arguments, malformed files, out-of-scope requests -> exit 2
USAGE_ERRORS = (ParseError, UnsupportedField, UnsupportedQ, CapExceeded,
                IndexOutOfRange, NotTransitive, NotSubgroup, NotEnumerated,
                SpecMismatch, DivisionByZero, SingularMatrix, OSError,
                ValueError, KeyError, json.JSONDecodeError)


class _Exit(Exception):
    """Internal: carry an exit code through the dispatcher."""

    def __init__(self, code: int, message: str | None = None):
        super().__init__(message or "")
        self.code = code
        self.message = message


def _int_any_base(text: str) -> int:
    return int(text, 0)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=_int_any_base, default=DEFAULT_SEED,
                        help="RNG seed for eigencombinations and sampling "
                             "(default 0x%X)" % DEFAULT_SEED)
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default="json",
                        help="output format (default json)")
    parser.add_argument("--out", metavar="FILE", default=None,
                        help="write the result here instead of stdout")
    parser.add_argument("--json-errors", action="store_true",
                        help="machine-readable error report on stderr")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker count; results are independent of it")
    parser.add_argument("--tol-eigen", type=float, default=DEFAULT_TOL_EIGEN,
                        help="eigensolver residual tolerance")
    parser.add_argument("--tol-compare", type=float, default=DEFAULT_TOL_COMPARE,
                        help="table comparison / verification tolerance")
    parser.add_argument("--cap-elements", type=int, default=None,
                        help="override the element cap (also via "
                             "SCHEMEFORGE_CAP_ELEMENTS)")


def _config_from(args: argparse.Namespace) -> RunConfig:
    cap = args.cap_elements if args.cap_elements is not None else element_cap_default()
    return RunConfig(seed=args.seed, element_cap=cap,
                     tol_eigen=args.tol_eigen, tol_compare=args.tol_compare,
                     threads=args.threads, output_format=args.format)


def _echo_header(cfg: RunConfig) -> None:
    print(f"# schemeforge seed={cfg.seed:#x} tol_eigen={cfg.tol_eigen:g} "
          f"tol_compare={cfg.tol_compare:g} format={cfg.output_format}",
          file=sys.stderr)


# ingestion: files or stdin, JSON or table CSV


def _read_text(args: argparse.Namespace, flag: str, value: str | None) -> str:
    if getattr(args, "stdin", False) and value is None:
        return sys.stdin.read()
    if value is None:
        raise _Exit(2, f"missing input: pass {flag} FILE or --stdin")
    return _read_file(value)


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_table(text: str) -> chartab.CharacterTable:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return chartab.CharacterTable.from_json(json.loads(text))
    if stripped.startswith("kind,character-table"):
        return chartab.table_from_csv(text)
    raise ParseError("expected character-table JSON or CSV")


def _rebuild_functional_scheme(data: dict, cfg: RunConfig):
    source = data.get("relations", {}).get("source")
    if not isinstance(source, dict):
        raise ParseError("scheme JSON has neither a matrix nor a source descriptor")
    kind = source.get("kind")
    if kind == "paige-loop-scheme":
        loop = zorn.build_paige_loop(int(source["q"]), element_cap=cfg.element_cap)
        class_of = np.asarray(source["class_of"], dtype=np.int64)
        built = loopcore.loop_scheme(loop, class_of=class_of)
    else:
        raise ParseError(f"cannot rebuild a scheme from source kind {kind!r}")
    if built.n != int(data["n"]) or built.d != int(data["d"]):
        raise ParseError("scheme JSON header disagrees with its rebuilt relation")
    if built.valencies.tolist() != [int(v) for v in data["valencies"]]:
        raise ParseError("scheme JSON valencies disagree with its rebuilt relation")
    return built


def _load_scheme(text: str, cfg: RunConfig) -> scheme_mod.AssociationScheme:
    stripped = text.lstrip()
    if stripped.startswith("kind,scheme"):
        return scheme_mod.scheme_from_csv(text)
    if not stripped.startswith("{"):
        raise ParseError("expected scheme JSON or CSV")
    data = json.loads(text)
    if "matrix" in data.get("relations", {}):
        return scheme_mod.AssociationScheme.from_json(data)
    return _rebuild_functional_scheme(data, cfg)


def _resolve_group(args: argparse.Namespace, cfg: RunConfig) -> permgroup.PermutationGroup:
    picked = [name for name in ("gens", "psl2", "sl2", "cyclic", "symmetric")
              if getattr(args, name, None) is not None]
    if len(picked) != 1:
        raise _Exit(2, "pick exactly one group source: --gens/--psl2/--sl2/"
                       "--cyclic/--symmetric")
    which = picked[0]
    if which == "gens":
        gens = permgroup.load_generators(args.gens, degree=getattr(args, "points", None))
        return permgroup.closure(gens)
    if which == "psl2":
        return permgroup.psl2(args.psl2)
    if which == "sl2":
        return permgroup.sl2(args.sl2)
    if which == "cyclic":
        return permgroup.cyclic(args.cyclic)
    return permgroup.symmetric(args.symmetric)


def _add_group_source(parser: argparse.ArgumentParser, with_points: bool = False) -> None:
    parser.add_argument("--gens", metavar="FILE",
                        help="generator file: one permutation per line, "
                             "image list or cycles")
    parser.add_argument("--psl2", type=int, metavar="Q",
                        help="projective special linear group on the "
                             "projective line over GF(Q)")
    parser.add_argument("--sl2", type=int, metavar="Q",
                        help="special linear group on the nonzero vectors of GF(Q)^2")
    parser.add_argument("--cyclic", type=int, metavar="N")
    parser.add_argument("--symmetric", type=int, metavar="N")
    if with_points:
        parser.add_argument("--points", type=int, default=None,
                            help="expected degree of the generator file")


def _resolve_subgroup(group: permgroup.PermutationGroup,
                      args: argparse.Namespace) -> list[int]:
    if (args.sub is None) == (args.stab is None):
        raise _Exit(2, "pick exactly one subgroup source: --sub FILE or --stab POINT")
    group.require_enumerated()
    if args.stab is not None:
        return permgroup.stabilizer(group, args.stab)
    gens = permgroup.load_generators(args.sub, degree=group.degree)
    sub = permgroup.closure(gens)
    index = {g.images: i for i, g in enumerate(group.elements)}
    members = []
    for element in sub.elements:
        if element.images not in index:
            raise NotSubgroup("subgroup file contains a permutation outside the group")
        members.append(index[element.images])
    return sorted(members)


# rendering


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _render_table(table: chartab.CharacterTable, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        return _dump_json(table.to_json())
    if cfg.output_format == "csv":
        return chartab.table_to_csv(table)
    if cfg.output_format == "latex":
        return chartab.table_to_latex(table)
    return chartab.table_to_text(table)


def _render_scheme(sch: scheme_mod.AssociationScheme, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        return _dump_json(sch.to_json())
    if cfg.output_format == "csv":
        return scheme_mod.scheme_to_csv(sch)
    if cfg.output_format == "latex":
        raise _Exit(2, "latex output is only defined for character tables")
    lines = [f"scheme: n={sch.n}, d={sch.d}",
             "valencies: " + " ".join(str(int(k)) for k in sch.valencies),
             "transpose: " + " ".join(str(int(t)) for t in sch.transpose_map)]
    if sch.is_dense and sch.n <= 64:
        for row in sch.dense_matrix():
            lines.append("  " + " ".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def _render_loop(loop: zorn.PaigeLoop, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        return _dump_json(loop.to_json())
    if cfg.output_format == "text":
        return f"paige loop: q={loop.q} order={loop.n}\n"
    raise _Exit(2, "loop output supports json and text only")


def _render_group(group: permgroup.PermutationGroup, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        group.require_enumerated()
        return _dump_json({"degree": group.degree, "order": group.order,
                           "generators": [list(g.images) for g in group.generators]})
    if cfg.output_format == "text":
        # the text form is itself a loadable generator file
        lines = [" ".join(str(p) for p in g.images) for g in group.generators]
        return "\n".join(lines) + "\n"
    raise _Exit(2, "group output supports json and text only")


def _render_report(payload: dict, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        return _dump_json(payload)
    if cfg.output_format == "text":
        lines = [f"{key}: {value}" for key, value in payload.items()]
        return "\n".join(lines) + "\n"
    raise _Exit(2, "reports support json and text only")


def _write_output(text: str, args: argparse.Namespace) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# subcommand handlers: return (exit_code, rendered_output)


def _cmd_paige_build(args, cfg: RunConfig):
    loop = zorn.build_paige_loop(args.q, element_cap=cfg.element_cap)
    return 0, _render_loop(loop, cfg)


def _pipeline_table(q: int, cfg: RunConfig, policy: str) -> chartab.CharacterTable:
    loop = zorn.build_paige_loop(q, element_cap=cfg.element_cap)
    orbits = loopcore.inner_orbits(loop, policy=policy, seed=cfg.seed)
    sch = loopcore.loop_scheme(loop, class_of=orbits.class_of)
    return chartab.compute_character_table(sch, seed=cfg.seed,
                                           tol_eigen=cfg.tol_eigen)


def _cmd_paige_table(args, cfg: RunConfig):
    table = _pipeline_table(args.q, cfg, args.policy)
    return 0, _render_table(table, cfg)


def _cmd_group(args, cfg: RunConfig):
    if args.group_cmd == "psl2":
        group = permgroup.psl2(args.q)
    elif args.group_cmd == "sl2":
        group = permgroup.sl2(args.q)
    else:
        gens = permgroup.load_generators(args.gens, degree=args.points)
        group = permgroup.closure(gens)
    return 0, _render_group(group, cfg)


def _cmd_scheme_orbitals(args, cfg: RunConfig):
    group = _resolve_group(args, cfg)
    sch = permgroup.orbitals(group, n_points=args.points,
                             relation_cap=cfg.relation_cap)
    return 0, _render_scheme(sch, cfg)


def _cmd_scheme_group_scheme(args, cfg: RunConfig):
    group = _resolve_group(args, cfg)
    sch = permgroup.group_scheme(group, relation_cap=cfg.relation_cap)
    return 0, _render_scheme(sch, cfg)


def _load_loop(args, cfg: RunConfig) -> loopcore.LoopStructure:
    if (args.q is None) == (args.loop is None):
        raise _Exit(2, "pick exactly one loop source: --q Q or --loop FILE")
    if args.q is not None:
        return zorn.build_paige_loop(args.q, element_cap=cfg.element_cap)
    with open(args.loop, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return zorn.PaigeLoop.from_json(json.loads(text))
    return loopcore.TableLoop(loopcore.parse_loop_table(text))


def _cmd_scheme_loop_scheme(args, cfg: RunConfig):
    loop = _load_loop(args, cfg)
    orbits = loopcore.inner_orbits(loop, policy=args.policy, seed=cfg.seed)
    sch = loopcore.loop_scheme(loop, class_of=orbits.class_of)
    return 0, _render_scheme(sch, cfg)


def _parse_cells(spec: str, d: int) -> list[list[int]]:
    cells = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            cells.append(sorted(int(tok) for tok in chunk.split(",")))
        except ValueError:
            raise _Exit(2, f"bad cell spec {chunk!r}; use e.g. '1,2;3'") from None
    named = {c for cell in cells for c in cell}
    for cls in range(d + 1):
        if cls not in named:
            cells.append([cls])
    return cells


def _cmd_scheme_fuse(args, cfg: RunConfig):
    sch = _load_scheme(_read_text(args, "--scheme", args.scheme), cfg)
    cells = _parse_cells(args.cells, sch.d)
    fused = scheme_mod.fuse(sch, cells)
    return 0, _render_scheme(fused, cfg)


def _cmd_scheme_verify(args, cfg: RunConfig):
    sch = _load_scheme(_read_text(args, "--scheme", args.scheme), cfg)
    report = scheme_mod.verify_scheme_axioms(sch, seed=cfg.seed)
    payload = {"passed": report.passed, "n": sch.n, "d": sch.d,
               "failures": list(report.failures)}
    return (0 if report.passed else 1), _render_report(payload, cfg)


def _cmd_chartable_compute(args, cfg: RunConfig):
    sch = _load_scheme(_read_text(args, "--scheme", args.scheme), cfg)
    table = chartab.compute_character_table(sch, seed=cfg.seed,
                                            tol_eigen=cfg.tol_eigen)
    return 0, _render_table(table, cfg)


def _cmd_chartable_oracle(args, cfg: RunConfig):
    builder = (chartab.closed_form_mstar if args.chartable_cmd == "oracle-mstar"
               else chartab.closed_form_psl2)
    return 0, _render_table(builder(args.q), cfg)


def _cmd_chartable_verify(args, cfg: RunConfig):
    table = _load_table(_read_text(args, "--table", args.table))
    if args.scheme is not None:
        sch = _load_scheme(_read_file(args.scheme), cfg)
        inter = scheme_mod.intersection_numbers(sch)
        report = chartab.verify_candidate_table(table, inter, tol=cfg.tol_compare)
        payload = {"passed": report.passed, "checks": report.checks,
                   "eigen_residual": report.max_eigen_residual,
                   "orthogonality_residual": report.orthogonality.max_residual}
    else:
        ortho = chartab.verify_orthogonality(table, tol=cfg.tol_compare)
        unit_col = float(np.abs(table.P[:, 0] - 1.0).max())
        valency_row = float(np.abs(table.P[0] - table.valencies).max()
                            / max(1, int(table.valencies.max())))
        passed = (ortho.passed and unit_col <= cfg.tol_compare
                  and valency_row <= cfg.tol_compare)
        payload = {"passed": bool(passed),
                   "orthogonality_residual": ortho.max_residual,
                   "unit_column_error": unit_col,
                   "valency_row_error": valency_row}
    return (0 if payload["passed"] else 1), _render_report(payload, cfg)


def _cmd_chartable_compare(args, cfg: RunConfig):
    table = _load_table(_read_text(args, "--table", args.table))
    other = _load_table(_read_file(args.other))
    match = chartab.compare_tables(table, other, tol=cfg.tol_compare)
    payload = {"matched": match.matched, "max_diff": match.max_diff}
    if match.matched:
        payload["row_perm"] = [int(i) for i in match.row_perm]
        payload["col_perm"] = [int(j) for j in match.col_perm]
    return (0 if match.matched else 1), _render_report(payload, cfg)


def _cmd_chartable_transfer(args, cfg: RunConfig):
    table = _load_table(_read_text(args, "--table", args.table))
    gct = chartab.transfer_to_group_table(table, tol_square=cfg.tol_square)
    payload = {
        "T": [[{"re": float(z.real), "im": float(z.imag)} for z in row]
              for row in gct.T],
        "degrees": [int(f) for f in gct.degrees],
        "class_sizes": [int(k) for k in gct.class_sizes],
        "order": int(gct.order),
        "column_orthogonality_residual": gct.column_orthogonality_residual(),
    }
    return 0, _render_report(payload, cfg)


def _cmd_chartable_double_coset(args, cfg: RunConfig):
    group = _resolve_group(args, cfg)
    members = _resolve_subgroup(group, args)
    result = chartab.double_coset_table(group, members, seed=cfg.seed,
                                        tol=cfg.tol_compare)
    if cfg.output_format in ("csv", "latex", "text"):
        return 0, _render_table(result.table, cfg)
    payload = {"table": result.table.to_json(),
               "constituents": result.constituents,
               "theta": [float(t) for t in result.theta],
               "double_coset_sizes": [int(s) for s in result.part_sizes],
               "orbital_match_max_diff": result.orbital_match.max_diff}
    return 0, _dump_json(payload)


def _cmd_export(args, cfg: RunConfig):
    text = _read_text(args, "--in", getattr(args, "in_file"))
    stripped = text.lstrip()
    if stripped.startswith("kind,character-table"):
        return 0, _render_table(chartab.table_from_csv(text), cfg)
    if stripped.startswith("kind,scheme"):
        return 0, _render_scheme(scheme_mod.scheme_from_csv(text), cfg)
    if not stripped.startswith("{"):
        raise ParseError("expected a JSON or CSV artifact")
    data = json.loads(text)
    if "P" in data:
        return 0, _render_table(chartab.CharacterTable.from_json(data), cfg)
    if "relations" in data:
        return 0, _render_scheme(_load_scheme(text, cfg), cfg)
    if "elements" in data:
        return 0, _render_loop(zorn.PaigeLoop.from_json(data), cfg)
    raise ParseError("unrecognized artifact; expected a table, scheme or loop")


# parser assembly


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schemeforge",
        description="Association schemes from groups and Paige loops, "
                    "with numerically verified character tables.")
    top = parser.add_subparsers(dest="command", required=True)

    paige = top.add_parser("paige", help="simple Moufang loops over GF(q)")
    paige_sub = paige.add_subparsers(dest="paige_cmd", required=True)
    p_build = paige_sub.add_parser("build", help="enumerate the loop elements")
    p_build.add_argument("--q", type=int, required=True)
    _add_common(p_build)
    p_table = paige_sub.add_parser(
        "table", help="full pipeline: loop, inner orbits, scheme, table")
    p_table.add_argument("--q", type=int, required=True)
    p_table.add_argument("--policy", choices=("auto", "exact", "randomized"),
                         default="auto")
    _add_common(p_table)

    group = top.add_parser("group", help="permutation group constructors")
    group_sub = group.add_subparsers(dest="group_cmd", required=True)
    for name, help_text in (("psl2", "PSL(2,q) on the projective line"),
                            ("sl2", "SL(2,q) on the nonzero vectors")):
        g = group_sub.add_parser(name, help=help_text)
        g.add_argument("--q", type=int, required=True)
        _add_common(g)
    g_file = group_sub.add_parser("from-file", help="closure of a generator file")
    g_file.add_argument("--gens", metavar="FILE", required=True)
    g_file.add_argument("--points", type=int, default=None,
                        help="expected degree of the generator file")
    _add_common(g_file)

    sch = top.add_parser("scheme", help="association scheme constructions")
    sch_sub = sch.add_subparsers(dest="scheme_cmd", required=True)
    s_orb = sch_sub.add_parser("orbitals", help="2-orbit scheme of a transitive group")
    _add_group_source(s_orb, with_points=True)
    _add_common(s_orb)
    s_grp = sch_sub.add_parser("group-scheme", help="conjugacy scheme of a group")
    _add_group_source(s_grp)
    _add_common(s_grp)
    s_loop = sch_sub.add_parser("loop-scheme", help="inner-orbit scheme of a loop")
    s_loop.add_argument("--q", type=int, default=None,
                        help="build the simple Moufang loop over GF(q)")
    s_loop.add_argument("--loop", metavar="FILE", default=None,
                        help="loop table file or loop JSON")
    s_loop.add_argument("--policy", choices=("auto", "exact", "randomized"),
                        default="auto")
    _add_common(s_loop)
    s_fuse = sch_sub.add_parser("fuse", help="merge classes along a partition")
    s_fuse.add_argument("--scheme", metavar="FILE", default=None)
    s_fuse.add_argument("--stdin", action="store_true",
                        help="read the scheme from stdin")
    s_fuse.add_argument("--cells", required=True,
                        help="cells separated by ';', members by ','; "
                             "unlisted classes stay singletons")
    _add_common(s_fuse)
    s_verify = sch_sub.add_parser("verify", help="check the scheme axioms")
    s_verify.add_argument("--scheme", metavar="FILE", default=None)
    s_verify.add_argument("--stdin", action="store_true")
    _add_common(s_verify)

    chart = top.add_parser("chartable", help="character tables and verification")
    chart_sub = chart.add_subparsers(dest="chartable_cmd", required=True)
    c_compute = chart_sub.add_parser("compute", help="table of a scheme by "
                                                     "simultaneous diagonalization")
    c_compute.add_argument("--scheme", metavar="FILE", default=None)
    c_compute.add_argument("--stdin", action="store_true")
    _add_common(c_compute)
    for name, help_text in (
            ("oracle-mstar", "closed-form table of the Moufang loop scheme"),
            ("oracle-psl2", "closed-form table of the PSL(2,q) group scheme")):
        c = chart_sub.add_parser(name, help=help_text + ", q = 2^r")
        c.add_argument("--q", type=int, required=True)
        _add_common(c)
    c_verify = chart_sub.add_parser("verify", help="orthogonality and, with "
                                                   "--scheme, the full candidate check")
    c_verify.add_argument("--table", metavar="FILE", default=None)
    c_verify.add_argument("--stdin", action="store_true")
    c_verify.add_argument("--scheme", metavar="FILE", default=None,
                          help="verify the table against this scheme's "
                               "intersection numbers")
    _add_common(c_verify)
    c_compare = chart_sub.add_parser("compare", help="match two tables up to "
                                                     "row/column permutation")
    c_compare.add_argument("--table", metavar="FILE", default=None)
    c_compare.add_argument("--stdin", action="store_true",
                           help="read the first table from stdin")
    c_compare.add_argument("--other", metavar="FILE", required=True)
    _add_common(c_compare)
    c_transfer = chart_sub.add_parser("transfer", help="group character table "
                                                       "T = diag(f) P diag(1/k)")
    c_transfer.add_argument("--table", metavar="FILE", default=None)
    c_transfer.add_argument("--stdin", action="store_true")
    _add_common(c_transfer)
    c_dc = chart_sub.add_parser("double-coset", help="table from double cosets "
                                                     "and group characters")
    _add_group_source(c_dc)
    c_dc.add_argument("--sub", metavar="FILE", default=None,
                      help="generator file for the subgroup H")
    c_dc.add_argument("--stab", type=int, default=None,
                      help="use the stabilizer of this point as H")
    _add_common(c_dc)

    exp = top.add_parser("export", help="re-emit an artifact in another format")
    exp.add_argument("--in", dest="in_file", metavar="FILE", default=None)
    exp.add_argument("--stdin", action="store_true")
    _add_common(exp)

    return parser


_HANDLERS = {
    ("paige", "build"): _cmd_paige_build,
    ("paige", "table"): _cmd_paige_table,
    ("group", "psl2"): _cmd_group,
    ("group", "sl2"): _cmd_group,
    ("group", "from-file"): _cmd_group,
    ("scheme", "orbitals"): _cmd_scheme_orbitals,
    ("scheme", "group-scheme"): _cmd_scheme_group_scheme,
    ("scheme", "loop-scheme"): _cmd_scheme_loop_scheme,
    ("scheme", "fuse"): _cmd_scheme_fuse,
    ("scheme", "verify"): _cmd_scheme_verify,
    ("chartable", "compute"): _cmd_chartable_compute,
    ("chartable", "oracle-mstar"): _cmd_chartable_oracle,
    ("chartable", "oracle-psl2"): _cmd_chartable_oracle,
    ("chartable", "verify"): _cmd_chartable_verify,
    ("chartable", "compare"): _cmd_chartable_compare,
    ("chartable", "transfer"): _cmd_chartable_transfer,
    ("chartable", "double-coset"): _cmd_chartable_double_coset,
    ("export", None): _cmd_export,
}


def _report_error(args, kind: str, detail: str) -> None:
    if getattr(args, "json_errors", False):
        print(json.dumps({"error": {"kind": kind, "detail": detail}}),
              file=sys.stderr)
    else:
        print(f"schemeforge: {kind}: {detail}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = getattr(args, f"{args.command}_cmd", None) if args.command != "export" else None
    handler = _HANDLERS[(args.command, sub)]
    try:
        cfg = _config_from(args)
    except ValueError as exc:
        _report_error(args, "ValueError", str(exc))
        return 2
    _echo_header(cfg)
    try:
        code, output = handler(args, cfg)
        if output is not None:
            _write_output(output, args)
        return code
    except _Exit as exc:
        if exc.message:
            _report_error(args, "UsageError", exc.message)
        return exc.code
    except VERIFICATION_ERRORS as exc:
        _report_error(args, type(exc).__name__, str(exc))
        return 1
    except USAGE_ERRORS as exc:
        _report_error(args, type(exc).__name__, str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
