"""Command line: ``lambdakit <verb> ...``.  Exit codes: 0 all checks pass,
1 some check fails, 2 usage or input error."""
import functools
import sys
from fractions import Fraction

import click

from . import commands as C
from . import dsl


def _fraction(ctx, param, value):
    if value is None:
        return None
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter("expected a rational number like 5/2")


def common(f):
    @click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
    @functools.wraps(f)
    def wrapper(*args, fmt="text", **kw):
        try:
            rep = f(*args, **kw)
        except dsl.ScriptError as exc:
            click.echo("error: " + exc.render(), err=True)
            sys.exit(2)
        except (OSError, KeyError, ValueError) as exc:
            click.echo("error: %s" % exc, err=True)
            sys.exit(2)
        click.echo(rep.to_json() if fmt == "json" else rep.to_text())
        sys.exit(0 if rep.passed else 1)
    return wrapper


def jobs_opt(f):
    return click.option("--jobs", type=int, default=1, show_default=True, help="worker processes")(f)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Λ-bracket engine, Fock oracle, geometry and twist verifications."""


@main.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
@click.option("--render", is_flag=True, help="print the normalized script")
def parse(script, render):
    """Parse a script and report diagnostics."""
    with open(script, encoding="utf-8") as fh:
        text = fh.read()
    ast, err = dsl.try_parse(text)
    if err is not None:
        click.echo("%s:%s" % (script, err.render()), err=True)
        sys.exit(2)
    click.echo(dsl.render(ast) if render else "ok: %d statements" % len(ast.stmts))


@main.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
@common
def run(script):
    """Run every check statement of a script."""
    return C.run_checks(C.load_script(script))


@main.command()
@click.argument("expr")
@click.option("--script", type=click.Path(exists=True, dir_okay=False), help="defaults to the bundled flat n=1 script")
@common
def normalize(expr, script):
    """Canonical form of an expression."""
    return C.normalize(expr, script)


@main.command("bracket")
@click.argument("a")
@click.argument("b")
@click.option("--script", type=click.Path(exists=True, dir_okay=False))
@common
def bracket_cmd(a, b, script):
    """The Λ-bracket [a_Λ b]."""
    return C.bracket(a, b, script)


@main.command("verify-axioms")
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n", "models", type=int, multiple=True, default=(1, 2), show_default=True,
              help="free_sigma_model dimensions")
@jobs_opt
@common
def verify_axioms(trials, seed, models, jobs):
    """Randomized skew-symmetry, Jacobi and quasi-associativity."""
    return C.verify_axioms(trials=trials, seed=seed, jobs=jobs, models=models)


@main.command("verify-n2")
@click.argument("script", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--J", "J", default="J1", show_default=True)
@click.option("--H", "H", default="H", show_default=True)
@click.option("--c", "c", default=None, help="central charge (default 3 dim M)")
@common
def verify_n2(script, J, H, c):
    """N=2 relations for one pair (J, H)."""
    return C.verify_n2(script, J, H, c)


@main.command("verify-n22")
@click.argument("script", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--dim-m", type=int, default=None, help="real dimension (default 2n)")
@common
def verify_n22(script, dim_m):
    """The six families of the two commuting N=2 structures."""
    return C.verify_n22(script, dim_m)


@main.command("oracle-compare")
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--max-weight", default="2", callback=_fraction, show_default=True)
@click.option("--cutoff", default="5/2", callback=_fraction, show_default=True)
@click.option("--stability-cutoff", default="7/2", callback=_fraction, show_default=True)
@click.option("--no-untruncated", is_flag=True, help="skip the untruncated pass")
@jobs_opt
@common
def oracle_compare(n, max_weight, cutoff, stability_cutoff, no_untruncated, jobs):
    """Engine brackets against Fock-module commutators."""
    return C.oracle_compare(n=n, max_weight=max_weight, cutoff=cutoff, jobs=jobs,
                            stability_cutoff=stability_cutoff, untruncated=not no_untruncated)


@main.command("oracle-dump")
@click.argument("expr")
@click.option("--mode", nargs=2, type=int, default=(0, 1), show_default=True, help="j J")
@click.option("--cutoff", default="2", callback=_fraction, show_default=True)
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="-")
def oracle_dump(expr, mode, cutoff, n, out):
    """Write the (j|J) mode of a flat-model field as a sparse matrix:
    one line per entry, "row col re im" with exact rationals."""
    from . import fock
    from . import presentations as PR
    P, named = PR.flat_free_fields(n)
    b = dsl.Built(P, dict(dsl._bracket_keys(named)), set(), [])
    try:
        e = C.parse_expr(b, expr)
    except dsl.ScriptError as exc:
        click.echo("error: " + exc.render(), err=True)
        sys.exit(2)
    basis = fock.build_fock(P, cutoff)
    op = fock.field_to_operator(e, tuple(mode), basis)
    with click.open_file(out, "w") as fh:
        fh.write("# %s on %d states, cutoff %s\n" % (op.label, len(basis), cutoff))
        fh.write(op.dump())


@main.group()
def geometry():
    """Generalized-geometry checks on coordinate patches."""


@geometry.command("check-courant")
@click.option("--H", "H", type=click.Path(exists=True, dir_okay=False), default=None,
              help="3-form file, lines 'i j k : coefficient' (default H = 0)")
@click.option("--dim", type=int, default=None)
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@common
def check_courant(H, dim, trials, seed):
    """Courant algebroid axioms on random polynomial sections."""
    return C.check_courant(H, dim=dim, trials=trials, seed=seed)


@geometry.command()
@click.option("--n", type=int, default=1, show_default=True)
@common
def frames(n):
    """Adapted frames: duality, isotropy, conjugation, brackets."""
    return C.geometry_frames(n)


@geometry.command()
@common
def modular():
    """Modular-class representatives and trace identities."""
    return C.geometry_modular()


@geometry.command()
@click.option("--n", type=int, default=1, show_default=True)
@common
def dilaton(n):
    """Dilaton, v± + 2dΦ and Poisson divergences in the flat model."""
    return C.geometry_dilaton(n)


@geometry.command()
@common
def mukai():
    """Sign relating the two pure-spinor Mukai pairings."""
    return C.geometry_mukai()


@main.group()
def twist():
    """Zero modes of the twisted flat model."""


@twist.command("check")
@click.option("--cutoff", default="2", callback=_fraction, show_default=True)
@click.option("--n", type=int, default=1, show_default=True)
@common
def twist_check(cutoff, n):
    """Q², G², [G,Q] = L and cross-sector commutators as exact matrices."""
    return C.twist_check(cutoff, n)


@twist.command("cohomology")
@click.option("--weight", default="0", callback=_fraction, show_default=True)
@click.option("--diff", type=click.Choice(["Q+", "Q-", "QB", "QA"]), default="Q+", show_default=True)
@click.option("--cutoff", default="2", callback=_fraction, show_default=True)
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--no-stability", is_flag=True)
@common
def twist_cohomology(weight, diff, cutoff, n, no_stability):
    """Cohomology dimensions by degree at a twisted weight."""
    return C.twist_cohomology(weight, diff, cutoff, n, stability=not no_stability)


if __name__ == "__main__":
    main()
