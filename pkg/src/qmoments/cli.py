"""Command-line front end: ``qmoments {eval,density,figure,iterate,verify}``.

Exit codes: 0 ok, 1 a verification check failed, 2 domain error,
3 truncation budget exceeded, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .density import density_for_window, jump, jump_haar
from .errors import BudgetExceededError, DomainError, OutOfTableError
from .iteration import fixed_point_m, k_distance, orbit_from_delta_q
from .qkernel import QParam, TruncationBudget, c_q, euler_gamma_q, gamma_q, psi_q
from .transforms import f_q, h_q, mellin_nu_q

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4


def fmt(v: float) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(v))


@dataclass(frozen=True)
class RunConfig:
    q: float = 0.5
    tol: float = 1e-13
    x_max_in_L_units: float = 3.0
    grid_points: int = 301
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        QParam(self.q)
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        if int(self.grid_points) < 2:
            raise DomainError("grid_points must be at least 2")
        if not self.x_max_in_L_units > 0:
            raise DomainError("x-max-l must be positive")
        if self.format not in ("csv", "svg", "json"):
            raise DomainError(f"unknown format {self.format!r}")


def sample_rows(cfg: RunConfig) -> list[tuple[float, float, int]]:
    """``(x, (1-q) tau_q(x), piece)`` on ``[0, x_max L]``.

    A uniform grid of ``grid_points`` abscissae plus every breakpoint ``nL`` in
    ``(0, x_max L]``; each breakpoint appears twice, valued by the piece on its
    left and on its right.
    """
    qp = QParam(cfg.q)
    L = qp.L
    X = cfg.x_max_in_L_units * L
    d = density_for_window(qp, X, TruncationBudget(cfg.tol))
    grid = np.linspace(0.0, X, int(cfg.grid_points))
    n_break = int(math.floor(cfg.x_max_in_L_units + 1e-12))
    breaks = np.arange(1, n_break + 1) * L
    if breaks.size:
        keep = np.min(np.abs(grid[:, None] - breaks[None, :]), axis=1) > 1e-9 * L
        grid = grid[keep]
    # grid points are away from breakpoints, so floor picks the piece unambiguously
    gp = np.floor(grid / L).astype(int)
    vals = d(grid, piece=gp) if grid.size else np.array([])
    rows = [(float(x), float(v), int(p)) for x, v, p in zip(grid, vals, gp)]
    for n, x in enumerate(breaks, start=1):
        left = float(d(x, piece=n - 1))
        right = float(d(x, piece=n))
        rows.append((float(x), left, n - 1))
        rows.append((float(x), right, n))
    rows.sort(key=lambda r: (r[0], r[2]))
    return rows


def write_density_csv(cfg: RunConfig, stream) -> None:
    stream.write("x,tau_scaled,piece_index\n")
    for x, v, p in sample_rows(cfg):
        stream.write(f"{fmt(x)},{fmt(v)},{p}\n")


def _figure_svg(cfg: RunConfig) -> str:
    qp = QParam(cfg.q)
    L = qp.L
    rows = sample_rows(cfg)
    # one vertex per abscissa; at a breakpoint keep the right-hand piece
    pts = {}
    for x, v, _ in rows:
        pts[x] = v
    xs = sorted(pts)
    X = cfg.x_max_in_L_units * L
    y_top = max(1.0, max(pts.values())) * 1.05

    W, H = 640, 400
    left, right, top, bottom = 70, 20, 30, 50
    pw, ph = W - left - right, H - top - bottom
    sx, sy = pw / X, ph / y_top

    out = []
    a = out.append
    a('<?xml version="1.0" encoding="UTF-8"?>')
    a(f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">')
    a(f'<title>(1-q) tau_q on [0, {fmt(cfg.x_max_in_L_units)} log(1/q)], q = {fmt(cfg.q)}</title>')
    a(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
    a(f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>')
    a(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>')
    n_ticks = int(math.floor(cfg.x_max_in_L_units + 1e-12))
    for n in range(n_ticks + 1):
        px = left + n * L * sx
        label = "0" if n == 0 else ("log(1/q)" if n == 1 else f"{n} log(1/q)")
        a(f'<line x1="{px:.3f}" y1="{top + ph}" x2="{px:.3f}" y2="{top + ph + 6}" stroke="black"/>')
        if n > 0:
            a(f'<line x1="{px:.3f}" y1="{top}" x2="{px:.3f}" y2="{top + ph}" '
              f'stroke="#cccccc" stroke-dasharray="4,4"/>')
        a(f'<text x="{px:.3f}" y="{top + ph + 22}" font-family="sans-serif" font-size="12" '
          f'text-anchor="middle">{label}</text>')
    for i in range(6):
        yv = i * 0.2
        if yv > y_top:
            break
        py = top + ph - yv * sy
        a(f'<line x1="{left - 6}" y1="{py:.3f}" x2="{left}" y2="{py:.3f}" stroke="black"/>')
        a(f'<text x="{left - 10}" y="{py + 4:.3f}" font-family="sans-serif" font-size="12" '
          f'text-anchor="end">{yv:.1f}</text>')
    # vertices are written in data coordinates and mapped by the group transform
    a(f'<g transform="matrix({fmt(sx)},0,0,{fmt(-sy)},{left},{top + ph})">')
    points = " ".join(f"{fmt(x)},{fmt(pts[x])}" for x in xs)
    a(f'<polyline id="curve" fill="none" stroke="#1f4e9c" stroke-width="2" '
      f'vector-effect="non-scaling-stroke" points="{points}"/>')
    a("</g>")
    a(f'<text x="{left + pw / 2:.3f}" y="{top - 10}" font-family="sans-serif" font-size="14" '
      f'text-anchor="middle">(1-q) tau_q(x), q = {fmt(cfg.q)}</text>')
    a("</svg>")
    return "\n".join(out) + "\n"


def render_figure(cfg: RunConfig) -> str:
    """Write the SVG to ``cfg.output_path`` (or return it when no path is set)."""
    svg = _figure_svg(cfg)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    return svg


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise DomainError(f"--{name} is required for eval {args.function}")
    return v


def cmd_eval(args) -> int:
    qp = QParam(args.q)
    b = TruncationBudget(args.tol)
    fn = args.function
    value, bound = None, None
    if fn == "c_q":
        r = c_q(qp, b, method=args.method, with_bound=True)
        value, bound = r.value, r.bound
    elif fn == "psi_q":
        r = psi_q(_need(args, "z"), qp, b, with_bound=True)
        value, bound = r.value, r.bound
    elif fn == "gamma_q":
        r = gamma_q(_need(args, "z"), qp, b, with_bound=True)
        value, bound = r.value, r.bound
    elif fn == "gamma_euler_q":
        r = euler_gamma_q(qp, b, with_bound=True)
        value, bound = r.value, r.bound
    elif fn == "f_q":
        z = _need(args, "z") + (1j * args.y if args.y else 0.0)
        r = f_q(z, qp, b, with_bound=True)
        value, bound = r.value, r.bound
    elif fn == "mellin_nu":
        z = _need(args, "z") + (1j * args.y if args.y else 0.0)
        value = mellin_nu_q(z, qp, b)
        bound = f_q(z + 1, qp, b, with_bound=True).bound * abs(value) ** 2
    elif fn == "h_q":
        value = float(h_q(_need(args, "t"), qp, b))
        bound = b.tol
    elif fn == "jump":
        n = _need(args, "n")
        value = jump_haar(n, qp) if args.haar else jump(n, qp)
        bound = 0.0
    if isinstance(value, complex) or np.iscomplexobj(value):
        value = complex(value)
        shown = {"re": value.real, "im": value.imag}
        text = f"{fmt(value.real)}{'+' if value.imag >= 0 else '-'}{fmt(abs(value.imag))}j"
    else:
        shown = float(value)
        text = fmt(value)
    if args.format == "json":
        _emit(json.dumps({"function": fn, "q": qp.q, "value": shown, "bound": bound},
                         sort_keys=True) + "\n", args.out)
    else:
        _emit(f"{text}\nbound {fmt(bound)}\n", args.out)
    return EXIT_OK


def _config(args, fmt_default: str) -> RunConfig:
    return RunConfig(q=args.q, tol=args.tol, x_max_in_L_units=args.x_max_l,
                     grid_points=args.grid, output_path=args.out,
                     format=args.format or fmt_default)


def cmd_density(args) -> int:
    cfg = _config(args, "csv")
    if cfg.format == "json":
        rows = [{"x": x, "tau_scaled": v, "piece_index": p} for x, v, p in sample_rows(cfg)]
        _emit(json.dumps({"q": cfg.q, "rows": rows}) + "\n", cfg.output_path)
        return EXIT_OK
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            write_density_csv(cfg, fh)
    else:
        write_density_csv(cfg, sys.stdout)
    return EXIT_OK


def cmd_figure(args) -> int:
    cfg = _config(args, "svg")
    if cfg.format != "svg":
        raise DomainError("figure only supports --format svg")
    svg = render_figure(cfg)
    if not cfg.output_path:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_iterate(args) -> int:
    qp = QParam(args.q)
    if args.steps < 0 or args.n < 1:
        raise DomainError("need --steps >= 0 and --n >= 1")
    a = orbit_from_delta_q(qp, args.steps, args.n)
    m = fixed_point_m(args.n)
    kd = k_distance(a[1:], m[1:])
    if args.format == "json":
        _emit(json.dumps({"q": qp.q, "steps": args.steps, "moments": a.tolist(),
                          "k_distance": kd.value, "tail_bound": kd.tail_bound}) + "\n", args.out)
    else:
        lines = [f"a_{i} {fmt(v)}" for i, v in enumerate(a)]
        lines.append(f"k_distance {fmt(kd.value)}")
        lines.append(f"tail_bound {fmt(kd.tail_bound)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _parse_q_list(text: str) -> tuple[float, ...]:
    try:
        qs = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise DomainError(f"malformed --q-list {text!r}") from None
    if not qs:
        raise DomainError("empty --q-list")
    for q in qs:
        QParam(q)
    return qs


def cmd_verify(args) -> int:
    from . import acceptance

    qs = _parse_q_list(args.q_list)
    checks = acceptance.run(args.level, qs)
    report = [c.as_json() for c in checks]
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmoments", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_choices=("csv", "svg", "json"), default_fmt=None):
        sp.add_argument("--q", type=float, default=0.5)
        sp.add_argument("--tol", type=float, default=1e-13)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=fmt_choices, default=default_fmt)

    e = sub.add_parser("eval", help="evaluate one function")
    e.add_argument("function", choices=["psi_q", "gamma_q", "c_q", "gamma_euler_q", "f_q",
                                        "mellin_nu", "h_q", "jump"])
    common(e, ("text", "json"), "text")
    e.add_argument("--z", type=float)
    e.add_argument("--y", type=float, default=0.0, help="imaginary part of z")
    e.add_argument("--t", type=float)
    e.add_argument("--n", type=int)
    e.add_argument("--method", choices=["lambert", "divisor", "pochhammer"], default="lambert")
    e.add_argument("--haar", action="store_true", help="jump in the t = exp(-x) variable")
    e.set_defaults(func=cmd_eval)

    for name, func, helptext in (("density", cmd_density, "tabulate (1-q) tau_q as CSV"),
                                 ("figure", cmd_figure, "render (1-q) tau_q as SVG")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--grid", type=int, default=301)
        sp.add_argument("--x-max-l", type=float, default=3.0, dest="x_max_l")
        sp.set_defaults(func=func)

    it = sub.add_parser("iterate", help="moments of T applied repeatedly to delta_q")
    common(it, ("text", "json"), "text")
    it.add_argument("--steps", type=int, default=2)
    it.add_argument("--n", type=int, default=10)
    it.set_defaults(func=cmd_iterate)

    v = sub.add_parser("verify", help="run the acceptance checks, JSON report")
    v.add_argument("--q-list", default="0.3,0.5,0.9")
    v.add_argument("--level", choices=["fast", "full"], default="fast")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DomainError, OutOfTableError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
