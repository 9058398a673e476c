"""Command-line frontend over the toolkit.

Subcommands wrap one module operation each: build a retra-product, check
largeness, develop or retract a block-of-groups file, compute mod-p betti
numbers, or run the Helly degree-shift check.  Reports are deterministic
JSON carrying a format version and the sha256 of every input file; exit
codes are 0 (pass), 1 (verified failure), 2 (parse error), 3 (budget).
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import permcore
from .permcore import (BudgetError, GroupHomPerm, PermGroup, is_p_group,
                       is_soluble, order, parse_group, subgroup_order)
from .scx import SimplicialComplex, complex_to_text, largeness_report, \
    parse_complex, require_block
from .homcalc import helly_shift_check, reduced_betti
from .cog import (EMPTY, BlockOfGroups, ExtendedBlockOfGroups,
                  letter_images_in_top, normalize_simplex, retraction,
                  validate)
from .develop import development, unfold
from .retra import _common_prime, retra_product

FORMAT_VERSION = "retrakit-report-1"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3


class ParseFailure(Exception):
    """Bad input file or malformed reference; maps to exit code 2."""


class CheckFailure(Exception):
    """A verified negative outcome; maps to exit code 1."""

    def __init__(self, reason, detail=None):
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _read_text(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as ex:
        raise ParseFailure(f"cannot read {path}: {ex.strerror}")


def _emit(report: dict, out) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)


def _report(command: str, inputs, parameters: dict, result: dict) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "command": command,
        "inputs": {str(p): _sha256(Path(p)) for p in inputs},
        "parameters": parameters,
        "result": result,
    }


def _apply_budgets(args) -> dict:
    """Override the module caps from flags; returns the effective values."""
    if getattr(args, "max_order", None):
        permcore.ORDER_CAP = args.max_order
    if getattr(args, "max_degree", None):
        permcore.DEGREE_CAP = args.max_degree
    return {"max_order": permcore.ORDER_CAP,
            "max_degree": permcore.DEGREE_CAP,
            "max_cosets": getattr(args, "max_cosets", None)}


def _simplex_token(tok: str):
    if tok == "-":
        return EMPTY
    return normalize_simplex(tuple(tok.split(",")))


def _simplex_name(s) -> str:
    return "-" if s == EMPTY else ",".join(s)


def read_bog(path: Path):
    """Read a block-of-groups file.

    Three sections: ``facets:`` (one facet per line, vertices whitespace
    separated), ``groups:`` (lines ``simplex : group-file``, the simplex
    comma-joined or ``-`` for the top), and ``inclusions:`` (lines
    ``big > small : image ; image ...``, one cycle-form image per
    generator of the group at ``big``).  Group files are resolved
    relative to the block file; unassigned simplices carry the trivial
    group.  Returns an ExtendedBlockOfGroups when a top is assigned,
    otherwise a BlockOfGroups.
    """
    base_dir = path.parent
    facets = []
    group_files = {}
    inclusion_lines = []
    section = None
    for lineno, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.endswith(":") and line[:-1] in ("facets", "groups",
                                                "inclusions"):
            section = line[:-1]
            continue
        if section == "facets":
            facets.append(tuple(line.split()))
        elif section == "groups":
            if ":" not in line:
                raise ParseFailure(f"{path}:{lineno}: expected "
                                   f"'simplex : file'")
            tok, ref = (part.strip() for part in line.split(":", 1))
            group_files[tok] = ref
        elif section == "inclusions":
            if ">" not in line or ":" not in line:
                raise ParseFailure(f"{path}:{lineno}: expected "
                                   f"'big > small : images'")
            inclusion_lines.append((lineno, line))
        else:
            raise ParseFailure(f"{path}:{lineno}: content before any "
                               f"section header")
    if not facets:
        raise ParseFailure(f"{path}: no facets")

    try:
        blk = require_block(SimplicialComplex(facets))
    except ValueError as ex:
        raise ParseFailure(f"{path}: {ex}")

    groups = {}
    for tok, ref in group_files.items():
        try:
            G = parse_group(_read_text(base_dir / ref))
        except ValueError as ex:
            raise ParseFailure(f"{path}: group file {ref}: {ex}")
        groups[_simplex_token(tok)] = G

    local = {}
    for s in blk.complex.all_faces():
        local[s] = groups.get(s, PermGroup.trivial(1))
    for s in groups:
        if s != EMPTY and not blk.complex.has_face(s):
            raise ParseFailure(f"{path}: group assigned to unknown "
                               f"simplex {_simplex_name(s)}")

    inclusions = {}
    phi = {}
    for lineno, line in inclusion_lines:
        head, imgs = line.split(":", 1)
        big_tok, small_tok = (part.strip() for part in head.split(">", 1))
        big = _simplex_token(big_tok)
        small = _simplex_token(small_tok)
        if big == EMPTY or not blk.complex.has_face(big):
            raise ParseFailure(f"{path}:{lineno}: bad source simplex")
        source = local[big]
        target = groups[EMPTY] if small == EMPTY else local[small]
        images = []
        for part in imgs.split(";"):
            try:
                images.append(permcore.parse_perm(part.strip(),
                                                  target.degree))
            except ValueError as ex:
                raise ParseFailure(f"{path}:{lineno}: {ex}")
        if len(images) != len(source.generators):
            raise ParseFailure(f"{path}:{lineno}: expected "
                               f"{len(source.generators)} images, got "
                               f"{len(images)}")
        h = GroupHomPerm(source, target, images)
        if small == EMPTY:
            phi[big] = h
        else:
            inclusions[(big, small)] = h

    core = BlockOfGroups(blk, local, inclusions)
    if EMPTY not in groups:
        return core
    return ExtendedBlockOfGroups(core, groups[EMPTY], phi)


def _read_extension(path: Path) -> ExtendedBlockOfGroups:
    obj = read_bog(path)
    if not isinstance(obj, ExtendedBlockOfGroups):
        raise ParseFailure(f"{path}: no top group assigned ('-' entry)")
    report = validate(obj)
    if not report.ok:
        raise CheckFailure("block-of-groups data is inconsistent",
                           {"messages": report.messages})
    return obj


# ------------------------------------------------------------- subcommands


def cmd_retra(args) -> int:
    budgets = _apply_budgets(args)
    sides_path = Path(args.sides)
    refs = []
    for raw in _read_text(sides_path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            refs.append(line)
    if len(refs) != args.dim + 1:
        raise ParseFailure(f"{sides_path}: need {args.dim + 1} group "
                           f"files, got {len(refs)}")
    sides = [parse_group(_read_text(sides_path.parent / r)) for r in refs]

    ext = retra_product(args.dim, sides, args.n)
    top_order = order(ext.top)
    print(f"top order {top_order}")

    local_orders = {}
    by_codim = {}
    for s in ext.base.complex.all_faces():
        codim = args.dim + 1 - len(s)
        by_codim.setdefault(codim, []).append(s)
        local_orders[_simplex_name(s)] = order(ext.core.group(s))
    for codim in sorted(by_codim):
        row = ", ".join(f"{_simplex_name(s)}:{local_orders[_simplex_name(s)]}"
                        for s in sorted(by_codim[codim]))
        print(f"codim {codim}: {row}")

    p = _common_prime(sides)
    p_group = is_p_group(ext.top, p) if p is not None else None
    soluble = is_soluble(ext.top)
    if p is not None:
        print(f"p-group (p={p}): {p_group}")
    print(f"soluble: {soluble}")

    sides_sorted = sorted(ext.base.sides)
    table = {}
    for mask in range(2 ** len(sides_sorted) - 1):
        subset = [s for i, s in enumerate(sides_sorted) if mask >> i & 1]
        letters = []
        for s in subset:
            letters.extend(ext.phi[s].gen_images)
        got = subgroup_order(ext.top, letters)
        key = ";".join(_simplex_name(s) for s in subset) or "(empty)"
        table[key] = got
        print(f"subset [{key}] generates order {got}")

    _emit(_report("retra", [sides_path] + [sides_path.parent / r
                                           for r in refs],
                  {"dim": args.dim, "n": args.n, "budgets": budgets},
                  {"top_order": top_order, "local_orders": local_orders,
                   "p": p, "is_p_group": p_group, "is_soluble": soluble,
                   "generating_table": table}), args.out)
    return EXIT_PASS


def cmd_check_large(args) -> int:
    _apply_budgets(args)
    path = Path(args.complex)
    try:
        K = parse_complex(_read_text(path))
    except ValueError as ex:
        raise ParseFailure(f"{path}: {ex}")
    verdict, failing, witness = largeness_report(K, args.k)
    result = {"k": args.k, "verdict": verdict,
              "failing_simplex": None if failing is None else list(failing),
              "witness": None if witness is None else list(witness)}
    _emit(_report("check-large", [path], {"k": args.k}, result), args.out)
    if verdict:
        print(f"pass: complex is {args.k}-large")
        return EXIT_PASS
    where = "the complex" if failing == () else f"link of {failing}"
    print(f"fail: short cycle {witness} in {where}")
    return EXIT_FAIL


def cmd_develop(args) -> int:
    _apply_budgets(args)
    path = Path(args.block)
    ext = _read_extension(path)
    if args.max_order:
        dev = development(ext, order_cap=args.max_order)
    else:
        dev = development(ext)
    text = complex_to_text(dev.complex)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote development ({len(dev.complex.vertices)} vertices, "
              f"{len(dev.complex.facets)} facets) to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def _retract_witness(ext: ExtendedBlockOfGroups, n: int, trail: tuple):
    """First failing step of the recursive retractibility check, if any."""
    if n == 0:
        return None
    spots = sorted(ext.base.boundary.all_faces())
    for t in spots:
        if retraction(ext, EMPTY, t) is None:
            return trail + ((f"no retraction onto {_simplex_name(t)}"),)
    for t in spots:
        deeper = _retract_witness(unfold(ext, t), n - 1,
                                  trail + (f"unfold at {_simplex_name(t)}",))
        if deeper is not None:
            return deeper
    return None


def cmd_retract(args) -> int:
    _apply_budgets(args)
    path = Path(args.block)
    ext = _read_extension(path)
    witness = _retract_witness(ext, args.n, ())
    result = {"n": args.n, "retractible": witness is None,
              "witness": None if witness is None else list(witness)}
    _emit(_report("retract", [path], {"n": args.n}, result), args.out)
    if witness is None:
        print(f"pass: extension is {args.n}-retractible")
        return EXIT_PASS
    print(f"fail: {' -> '.join(witness)}")
    return EXIT_FAIL


def cmd_homology(args) -> int:
    _apply_budgets(args)
    path = Path(args.complex)
    try:
        K = parse_complex(_read_text(path))
        betti = reduced_betti(K, args.p)
    except ValueError as ex:
        raise ParseFailure(f"{path}: {ex}")
    print(" ".join(str(b) for b in betti))
    _emit(_report("homology", [path], {"p": args.p},
                  {"reduced_betti": list(betti)}), args.out)
    return EXIT_PASS


def cmd_helly(args) -> int:
    _apply_budgets(args)
    ambient = Path(args.complex)
    subs = [Path(s) for s in args.subcomplexes]
    try:
        X = parse_complex(_read_text(ambient))
        Ys = [parse_complex(_read_text(s)) for s in subs]
        verdict = helly_shift_check(X, Ys, args.p)
    except ValueError as ex:
        raise ParseFailure(f"{ex}")
    result = {"n": verdict.n, "p": verdict.p,
              "hypothesis_ok": verdict.hypothesis_ok,
              "failing_subsets": [list(s) for s in verdict.failing_subsets],
              "union_betti": None if verdict.union_betti is None
              else list(verdict.union_betti),
              "intersection_betti": None if verdict.intersection_betti is None
              else list(verdict.intersection_betti),
              "intersection_empty": verdict.intersection_empty,
              "shift_ok": verdict.shift_ok,
              "scope": verdict.scope}
    _emit(_report("helly", [ambient] + subs, {"p": args.p}, result),
          args.out)
    if verdict.ok:
        print("pass: degree shift holds")
        return EXIT_PASS
    if not verdict.hypothesis_ok:
        print(f"fail: sub-intersections not mod-{args.p} acyclic: "
              f"{verdict.failing_subsets}")
    else:
        print("fail: degree shift does not hold")
    return EXIT_FAIL


# ------------------------------------------------------------------ driver


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="retrakit",
        description="simplices of finite p-groups: constructions and "
                    "certificates")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", help="write the JSON report here")
    shared.add_argument("--max-order", type=int,
                        help="group-order budget override")
    shared.add_argument("--max-degree", type=int,
                        help="permutation-degree budget override")
    shared.add_argument("--max-cosets", type=int,
                        help="coset-enumeration budget override")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("retra", parents=[shared],
                       help="build a retra-product and print its orders")
    p.add_argument("sides", help="file listing one group file per side")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_retra)

    p = sub.add_parser("check-large", parents=[shared],
                       help="systole certification of a complex")
    p.add_argument("complex")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_check_large)

    p = sub.add_parser("develop", parents=[shared],
                       help="development of a block-of-groups extension")
    p.add_argument("block")
    p.set_defaults(func=cmd_develop)

    p = sub.add_parser("retract", parents=[shared],
                       help="recursive retractibility verdict")
    p.add_argument("block")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_retract)

    p = sub.add_parser("homology", parents=[shared],
                       help="reduced mod-p betti numbers")
    p.add_argument("complex")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("helly", parents=[shared],
                       help="degree-shift check for a cover")
    p.add_argument("complex")
    p.add_argument("subcomplexes", nargs="+")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_helly)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    saved = (permcore.ORDER_CAP, permcore.DEGREE_CAP)
    try:
        return args.func(args)
    except ParseFailure as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    except CheckFailure as ex:
        print(f"fail: {ex.reason}", file=sys.stderr)
        if ex.detail:
            print(json.dumps(ex.detail, sort_keys=True), file=sys.stderr)
        return EXIT_FAIL
    except BudgetError as ex:
        print(f"budget exceeded: {ex}", file=sys.stderr)
        return EXIT_BUDGET
    finally:
        permcore.ORDER_CAP, permcore.DEGREE_CAP = saved


if __name__ == "__main__":
    sys.exit(main())
