"""Command-line front end: ``sl3tilt <command> ...``.

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 unknown character.
"""

from __future__ import annotations

import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import click
import jsonschema

from . import characters as chars
from . import pathalg as pa
from .characters import UnknownTiltingCharacter, into_weyl_basis
from .decompose import tensor_decompose, verify_decomposition
from .family import (
    COMPOSITION_IDENTITIES,
    M_PRODUCTS,
    M,
    Atom,
    UnknownAtom,
    composition_identity,
    family_character,
    table_lines,
)
from .weights import Weight, WeightError, as_weight, linkage_classes

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_UNKNOWN = 0, 2, 3, 4


@dataclass
class CommandResult:
    command: str
    payload: dict
    text: str
    status: str = "ok"
    errata: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK

    def envelope(self) -> dict:
        return {"status": self.status, "command": self.command, "payload": self.payload, "errata": self.errata}


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    return json.loads(resources.files("sl3tilt").joinpath("schemas").joinpath(f"{name}.json").read_text())


def validate(result: CommandResult) -> None:
    jsonschema.validate(result.envelope(), load_schema("result"))
    schema = "error" if "error" in result.payload else result.command.replace("-", "_")
    jsonschema.validate(result.payload, load_schema(schema))


def parse_weight(text: str) -> Weight:
    m = re.fullmatch(r"\s*\(?\s*(\d+)\s*,\s*(\d+)\s*\)?\s*", text)
    if not m:
        raise click.BadParameter(f"expected a weight 'a,b', got {text!r}")
    return Weight(int(m.group(1)), int(m.group(2)))


def parse_atom(text: str) -> Atom:
    text = text.strip()
    if text == "M":
        return M
    m = re.fullmatch(r"([TL])\s*[:(]?\s*(\d+)\s*,\s*(\d+)\s*\)?", text)
    if not m:
        raise click.BadParameter(f"expected an atom like 'T(5,2)', 'L(1,1)' or 'M', got {text!r}")
    return Atom(m.group(1), Weight(int(m.group(2)), int(m.group(3))))


class WeightParam(click.ParamType):
    name = "a,b"

    def convert(self, value, param, ctx):
        if isinstance(value, Weight):
            return value
        try:
            return parse_weight(value)
        except click.BadParameter as exc:
            self.fail(str(exc), param, ctx)


WEIGHT = WeightParam()
PRIME = click.option("-p", "prime", type=click.Choice(["2", "3"]), required=True,
                     callback=lambda ctx, param, v: int(v), help="The characteristic.")
JSON_FLAG = click.option("--json", "as_json", is_flag=True, help="Emit a JSON document instead of text.")


def emit(result: CommandResult, as_json: bool) -> None:
    if as_json:
        validate(result)
        click.echo(json.dumps(result.envelope(), indent=2, ensure_ascii=False, sort_keys=True))
    else:
        click.echo(result.text)
        for note in result.errata:
            click.echo(f"erratum: {note}")
    if result.exit_code:
        sys.exit(result.exit_code)


def error_result(command: str, message: str, code: int, provenance: str | None = None) -> CommandResult:
    payload = {"error": message, "exit_code": code}
    if provenance:
        payload["provenance"] = provenance
    return CommandResult(command, payload, f"error: {message}", status="error", exit_code=code)


def _weyl_terms(expr) -> list:
    return [[[w[0], w[1]], m] for w, m in expr.sorted_terms()]


# ---------------------------------------------------------------------------
# command bodies (also callable from Python)

def cmd_decompose(p: int, lam: Weight, mu: Weight, canonical: bool = True, verify: bool = False) -> CommandResult:
    try:
        dec = tensor_decompose(p, lam, mu, canonical=canonical)
        if verify:
            verify_decomposition(dec)
    except UnknownTiltingCharacter as exc:
        return error_result("decompose", str(exc), EXIT_UNKNOWN, chars.missing_provenance(exc.p, exc.weight))
    except WeightError as exc:
        return error_result("decompose", str(exc), EXIT_USAGE)
    text = f"L({lam[0]},{lam[1]}) ⊗ L({mu[0]},{mu[1]}) ≅ {dec}"
    if verify:
        text += f"\nverified: {'true' if dec.verified else 'false'}"
    payload = dec.to_json()
    code = EXIT_VERIFY if verify and not dec.verified else EXIT_OK
    return CommandResult("decompose", payload, text, "ok" if code == EXIT_OK else "error", list(dec.errata), code)


def cmd_char(p: int, kind: str, target: str, full: bool = False) -> CommandResult:
    try:
        if kind == "atom":
            atom = parse_atom(target)
            ch = family_character(p, atom)
            label = str(atom)
            provenance = chars.tilting_provenance(p, atom.wt) if atom.kind == "T" and atom.wt else "computed"
        else:
            w = parse_weight(target)
            label = {"simple": "L", "weyl": "Δ", "tilting": "T"}[kind] + f"({w[0]},{w[1]})"
            if kind == "simple":
                ch, provenance = chars.simple_character(p, w), "computed"
            elif kind == "weyl":
                ch, provenance = chars.weyl_character(w), "computed"
            else:
                ch = chars.tilting_character(p, w)
                provenance = chars.tilting_provenance(p, w)
    except UnknownTiltingCharacter as exc:
        return error_result("char", str(exc), EXIT_UNKNOWN, chars.missing_provenance(exc.p, exc.weight))
    except (WeightError, UnknownAtom, click.BadParameter) as exc:
        return error_result("char", str(exc), EXIT_USAGE)
    expr = into_weyl_basis(ch)
    payload = {"p": p, "kind": kind, "label": label, "dim": ch.dim(),
               "weyl_terms": _weyl_terms(expr), "provenance": provenance}
    body = " + ".join(f"{'' if m == 1 else m}χ({w[0]},{w[1]})" for w, m in expr.sorted_terms())
    lines = [f"{label} at p={p}", f"dim: {ch.dim()}", f"Weyl terms ({len(expr.terms)}): {body}",
             f"provenance: {provenance}"]
    if full:
        dom = sorted(ch.dominant_part().items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0]))
        payload["dominant_multiplicities"] = [[[w[0], w[1]], m] for w, m in dom]
        lines.append("dominant multiplicities: " + ", ".join(f"({w[0]},{w[1]}):{m}" for w, m in dom))
    return CommandResult("char", payload, "\n".join(lines))


def _check_table_line(p, label, lam, mu, terms, corrupt):
    if corrupt:
        terms = [(k + 1, a) for k, a in terms[:1]] + list(terms[1:])
    total = chars.Character()
    for k, atom in terms:
        total = total + k * family_character(p, atom)
    ok = total == chars.multiply(chars.simple_character(p, lam), chars.simple_character(p, mu))
    return {"p": p, "kind": "table", "label": label, "lambda": list(lam), "mu": list(mu), "ok": ok}


def _check_identity(p, n, lam, mu, expected, corrupt):
    want = {Weight(*w): m for w, m in expected.items()}
    if corrupt:
        top = next(iter(want))
        want[top] += 1
    ok = composition_identity(p, Weight(*lam), Weight(*mu)) == want
    return {"p": p, "kind": "identity", "label": f"({n})", "lambda": list(lam), "mu": list(mu), "ok": ok}


def _check_m_product(m, corrupt):
    terms = M_PRODUCTS[m]
    if corrupt:
        terms = [(k, a.flipped()) for k, a in terms]
    total = chars.Character()
    for k, atom in terms:
        total = total + k * family_character(3, atom)
    ok = total == chars.multiply(family_character(3, m), family_character(3, M))
    return {"p": 3, "kind": "m-product", "label": f"{m}⊗M", "lambda": list(m.wt), "mu": [], "ok": ok}


def cmd_verify_tables(primes: tuple[int, ...] = (2, 3), corrupt: str | None = None, workers: int = 4) -> CommandResult:
    """Recompute every table line and composition identity from simple characters.

    ``corrupt`` names one check ("table:<label>", "identity:<label>" or
    "m-product:T(1,0)") whose
    expected data is perturbed before checking, as a negative control.
    """
    jobs = []
    for p in primes:
        for label, lam, mu, terms in table_lines(p):
            jobs.append((_check_table_line, p, label, lam, mu, terms, corrupt == f"table:{label}"))
        for n, (lam, mu, expected) in enumerate(COMPOSITION_IDENTITIES[p], 1):
            jobs.append((_check_identity, p, n, lam, mu, expected, corrupt == f"identity:({n})"))
        if p == 3:
            for m in M_PRODUCTS:
                jobs.append((_check_m_product, m, corrupt == f"m-product:{m}"))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda job: job[0](*job[1:]), jobs))
    failed = [r for r in results if not r["ok"]]
    lines = []
    for r in results:
        lam, mu = r["lambda"], r["mu"]
        right = f"L({mu[0]},{mu[1]})" if mu else "M"
        lines.append(f"p={r['p']} {r['kind']:9} {r['label']:9} L({lam[0]},{lam[1]}) ⊗ {right}: "
                     + ("pass" if r["ok"] else "FAIL"))
    lines.append(f"{len(results) - len(failed)} passed, {len(failed)} failed")
    payload = {"results": results, "passed": len(results) - len(failed), "failed": len(failed)}
    code = EXIT_VERIFY if failed else EXIT_OK
    return CommandResult("verify-tables", payload, "\n".join(lines), "error" if failed else "ok", exit_code=code)


def cmd_linkage(p: int, weights: list[Weight]) -> CommandResult:
    classes = linkage_classes(p, [as_weight(w) for w in weights])
    payload = {"p": p, "classes": [[list(w) for w in c] for c in classes]}
    text = "\n".join("{" + ", ".join(f"({w[0]},{w[1]})" for w in c) + "}" for c in classes)
    return CommandResult("linkage", payload, text)


# ---------------------------------------------------------------------------
# appendix workbench

APPENDIX_SUBCOMMANDS = ("basis", "projectives", "tilting", "rigidity", "dual", "subspaces", "aprime", "dot")


def _layers_json(report: pa.FiltrationReport) -> list[list[str]]:
    return [sorted(layer) for layer in report.layers]


def _counter_json(c) -> dict[str, int]:
    return {v: c[v] for v in sorted(c)}


def _named_module(alg: pa.FiniteDimAlgebra, name: str) -> pa.QuiverRepresentation:
    order = pa.DEFAULT_ORDER
    if name == "T43":
        return pa.tilting_43(alg)
    kind, v = name[0], name[1:]
    if v not in alg.quiver.vertices:
        raise click.BadParameter(f"unknown module {name!r}")
    if kind == "P":
        return pa.projective(alg, v)
    if kind == "D":
        return pa.delta_module(alg, order, v)
    if kind == "N":
        return pa.nabla_module(alg, order, v)
    raise click.BadParameter(f"unknown module {name!r}")


def cmd_appendix(sub: str, field_spec: str = "QQ", presentation: str | None = None,
                 module: str = "T43", strategy: str = "native", output: str | None = None) -> CommandResult:
    if presentation:
        pres = pa.AlgebraPresentation.from_json(Path(presentation).read_text())
        pres = pres.with_field(field_spec) if field_spec != "QQ" else pres
    else:
        pres = pa.builtin_presentation("A-prime" if sub == "aprime" else "A-appendix", field_spec)
    alg = pa.build_algebra(pres)
    order = pa.DEFAULT_ORDER
    lines: list[str] = []
    result: dict = {}

    if sub == "basis":
        groups = alg.basis_by_length()
        result = {"dim": alg.dim, "strata": alg.strata(), "nilpotency_degree": alg.nilpotency_degree,
                  "basis": [[str(q) for q in g] for g in groups]}
        lines.append(f"dim {alg.dim}, nilpotency degree {alg.nilpotency_degree}, strata {alg.strata()}")
        lines += [f"length {i}: " + " ".join(str(q) for q in g) for i, g in enumerate(groups)]
    elif sub == "projectives":
        for v in alg.quiver.vertices:
            P = pa.projective(alg, v)
            rad = pa.radical_filtration(P)
            result[v] = {"dim": P.dim, "radical_layers": _layers_json(rad)}
            lines.append(f"P({v}): dim {P.dim}; radical layers {rad}")
    elif sub in ("tilting", "rigidity"):
        T = pa.tilting_43(alg)
        rad, soc = pa.radical_filtration(T), pa.socle_filtration(T)
        rigid = pa.is_rigid(T)
        result = {"dim": T.dim, "loewy_length": rad.loewy_length, "rigid": rigid,
                  "radical_layers": _layers_json(rad), "socle_layers": _layers_json(soc),
                  "top": _counter_json(pa.top_of(T)), "socle": _counter_json(pa.socle_of(T)),
                  "composition": _counter_json(T.composition())}
        if sub == "rigidity":
            lines.append(f"T(43): {'rigid' if rigid else 'NOT rigid'}; Loewy length {rad.loewy_length}")
            lines.append(f"radical layers (top first): {rad}")
            lines.append(f"socle layers (socle first): {soc}")
        else:
            built = pa.build_tilting(alg, order, "43")
            result["constructed_isomorphic"] = pa.rep_isomorphic(built, T)
            result["self_dual"] = pa.rep_isomorphic(T, pa.contravariant_dual(alg, T))
            result["delta_multiplicities"] = pa.delta_multiplicities(alg, order, built)
            lines.append(f"T(43) = P(10)/γA: dim {T.dim}; top {dict(pa.top_of(T))}; socle {dict(pa.socle_of(T))}")
            lines.append(f"radical layers (top first): {rad}")
            lines.append(f"universal-extension construction isomorphic: {result['constructed_isomorphic']}")
            lines.append(f"self-dual: {result['self_dual']}")
            lines.append(f"Δ-multiplicities: {result['delta_multiplicities']}")
    elif sub == "dual":
        T = pa.tilting_43(alg)
        D43 = pa.delta_module(alg, order, "43")
        N43 = pa.nabla_module(alg, order, "43")
        rad_d = pa.sub_rep(D43, pa.radical_series(D43)[1])
        n_mod_soc = pa.quotient_rep(N43, pa._preimage(N43, pa._zero(N43)))
        result = {
            "T43_self_dual": pa.rep_isomorphic(T, pa.contravariant_dual(alg, T)),
            "dual_delta43_is_nabla43": pa.rep_isomorphic(pa.contravariant_dual(alg, D43), N43),
            "rad_delta43_iso_nabla43_mod_soc": pa.rep_isomorphic(rad_d, n_mod_soc),
            "rad_delta43_layers": _layers_json(pa.radical_filtration(rad_d)),
        }
        lines += [f"{k}: {v}" for k, v in result.items()]
    elif sub == "subspaces":
        report = pa.four_subspace_report(pa.tilting_43(alg))
        result = report.to_json()
        lines.append(f"dim V = {report.dim_V}; dims U1..U4 = {report.dims}")
        lines.append(f"dim U1∩U2 = {report.dim_U1_cap_U2} (= Im γγ′: {report.cap_is_image_of_gg})")
        lines.append(f"dim U3+U4 = {report.dim_U3_plus_U4} (= Ker γγ′: {report.sum_is_kernel_of_gg})")
        lines.append(f"lattice size {report.lattice_size}; U1∩U2 ⊆ U3+U4: {report.cap_below_sum}")
    elif sub == "aprime":
        built = pa.build_tilting(alg, order, "43")
        mults = pa.delta_multiplicities(alg, order, built)
        result = {"dim_algebra": alg.dim, "strata": alg.strata(), "tilting_dim": built.dim,
                  "delta_multiplicities": mults, "radical_layers": _layers_json(pa.radical_filtration(built))}
        lines.append(f"A′: dim {alg.dim}, strata {alg.strata()}")
        lines.append(f"T(43) over A′: dim {built.dim}; Δ-multiplicities {mults}")
    elif sub == "dot":
        m = _named_module(alg, module)
        text = pa.coefficient_quiver_dot(m, strategy, name=module)
        edges = text.count("->")
        result = {"module": module, "strategy": strategy, "nodes": m.dim, "edges": edges}
        if output:
            Path(output).write_text(text)
            result["output"] = output
            lines.append(f"wrote {output}: {m.dim} nodes, {edges} edges")
        else:
            lines.append(text.rstrip("\n"))
    payload = {"subcommand": sub, "algebra": pres.name or "custom", "field": field_spec, "result": result}
    return CommandResult("appendix", json.loads(json.dumps(payload, default=str)), "\n".join(lines))


# ---------------------------------------------------------------------------
# click wiring

@click.group()
@click.option("--no-cache", is_flag=True, help="Do not read or write the derived-character cache.")
@click.option("--cache", "cache_path", type=click.Path(dir_okay=False), default=None,
              help=f"Cache file (default: ${chars.CACHE_ENV_VAR} or {chars.DEFAULT_CACHE_PATH}).")
def main(no_cache: bool, cache_path: str | None) -> None:
    """Tensor products of simple SL3 modules in characteristic 2 and 3."""
    chars.configure_cache(not no_cache, cache_path)


@main.command()
@PRIME
@click.argument("lam", type=WEIGHT)
@click.argument("mu", type=WEIGHT)
@JSON_FLAG
@click.option("--no-canonicalize", is_flag=True, help="Keep the per-degree factors unmerged.")
@click.option("--verify", is_flag=True, help="Check the character identity exactly.")
def decompose(prime, lam, mu, as_json, no_canonicalize, verify):
    """Decompose L(LAM) ⊗ L(MU) into indecomposable summands."""
    emit(cmd_decompose(prime, lam, mu, not no_canonicalize, verify), as_json)


@main.command()
@PRIME
@click.argument("kind", type=click.Choice(["simple", "weyl", "tilting", "atom"]))
@click.argument("target")
@JSON_FLAG
@click.option("--full", is_flag=True, help="Also list dominant weight multiplicities.")
def char(prime, kind, target, as_json, full):
    """Character of L, Δ, T at weight TARGET, or of a family atom such as T(5,2) or M."""
    emit(cmd_char(prime, kind, target, full), as_json)


@main.command("verify-tables")
@click.option("-p", "prime", type=click.Choice(["2", "3"]), default=None, help="Restrict to one prime.")
@JSON_FLAG
@click.option("--inject-corruption", "corrupt", default=None, hidden=True,
              help="Perturb one check, e.g. 'table:(1)' or 'identity:(21)'.")
def verify_tables(prime, as_json, corrupt):
    """Recompute the restricted tables and composition identities."""
    primes = (int(prime),) if prime else (2, 3)
    emit(cmd_verify_tables(primes, corrupt), as_json)


@main.command()
@PRIME
@click.argument("weights", type=WEIGHT, nargs=-1, required=True)
@JSON_FLAG
def linkage(prime, weights, as_json):
    """Group WEIGHTS into linkage classes."""
    emit(cmd_linkage(prime, list(weights)), as_json)


@main.command()
@click.argument("sub", metavar="SUBCOMMAND", type=click.Choice(APPENDIX_SUBCOMMANDS))
@click.option("--field", "field_spec", default="QQ", show_default=True, help="QQ or GF(q).")
@click.option("--presentation", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON presentation file to use instead of the built-in algebra.")
@click.option("--module", default="T43", show_default=True, help="For dot: T43, P<v>, D<v> or N<v>.")
@click.option("--strategy", type=click.Choice(["native", "radical"]), default="native", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="For dot: write DOT here.")
@JSON_FLAG
def appendix(sub, field_spec, presentation, module, strategy, output, as_json):
    """Quiver-algebra computations around the module T(43)."""
    try:
        result = cmd_appendix(sub, field_spec, presentation, module, strategy, output)
    except (ValueError, KeyError) as exc:
        result = error_result("appendix", str(exc), EXIT_USAGE)
    emit(result, as_json)


if __name__ == "__main__":
    main()
