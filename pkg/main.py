# main.py
"""
구면 자기사상의 차수 / 비반복 인증서 CLI.

    python main.py degree   -e "(pow 2)"
    python main.py certify  -f maps.txt
    python main.py distance -a "(pow 2)" -b "(perturb 5 0.4 (pow 2))"
    python main.py homotopy -a "(id 1)" -b "(antipode 1)"
    python main.py experiment --dim 1 --count 100 --epsilon-max 0.9 --seed 1
    python main.py probe --dim 2 --count 10

표준출력에는 JSON lines 만, 진행 로그와 요약은 표준에러로 나간다.
"""
import argparse
import json
import logging
import sys

from config import Config
from models.certificates import certify_not_iterate, homotopy_check
from models.degree import DegreeParams, degree, sup_distance
from models.errors import SphereDegreeError
from models.experiment import probe_iterates, run_ball_experiment, summarize
from models.map_dsl import parse, read_expressions
from utils.report import RunReport, emit, run_timed

logger = logging.getLogger("sphere_degree")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--resolution", type=int, default=None, help="initial / grid resolution N")
    common.add_argument("--max-resolution", type=int, default=None, help="adaptive degree loop upper bound")
    common.add_argument("--tolerance", type=float, default=None, help="residual tolerance before rounding")
    common.add_argument("--json", action=argparse.BooleanOptionalAction, default=True, help="JSON lines output")
    common.add_argument("--seed", type=int, default=None, help="master seed (experiment / probe)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(
        prog="sphere-degree",
        description="Brouwer degree and non-iterate certificates for self-maps of S^1 and S^2.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("degree", "Brouwer degree of each expression"),
        ("certify", "non-iterate certificate (or refusal) for each expression"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("-e", "--expr", help="inline s-expression")
        src.add_argument("-f", "--file", help="file with one s-expression per line, '#' comments")

    p = sub.add_parser("distance", parents=[common], help="sampled sup distance between two maps")
    p.add_argument("-a", required=True, help="first map")
    p.add_argument("-b", required=True, help="second map")
    p.add_argument("--lipschitz", type=float, nargs=2, metavar=("LF", "LG"), default=None)

    p = sub.add_parser("homotopy", parents=[common], help="validity of the straight-line homotopy H_g")
    p.add_argument("-a", required=True, help="base map f0")
    p.add_argument("-b", required=True, help="target map g")
    p.add_argument("--t-steps", type=int, default=None)

    p = sub.add_parser("experiment", parents=[common], help="ball certificates around a degree-l base map")
    p.add_argument("--dim", type=int, choices=(1, 2), default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--epsilon-max", type=float, default=None)
    p.add_argument("--base-degree", type=int, default=None)
    p.add_argument("--t-steps", type=int, default=None)
    p.add_argument("--plot", default=None, help="save a PNG of the experiment")

    p = sub.add_parser("probe", parents=[common], help="check that random iterates lie outside B_1(f0)")
    p.add_argument("--dim", type=int, choices=(1, 2), default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--base-degree", type=int, default=None)
    p.add_argument("--max-exponent", type=int, default=None)
    return ap


def apply_args(cfg, args):
    """플래그로 Config 를 덮어쓴다"""
    overrides = {
        "initial_resolution": args.resolution,
        "max_resolution": args.max_resolution,
        "tolerance": args.tolerance,
        "seed": args.seed,
        "t_steps": getattr(args, "t_steps", None),
        "dim": getattr(args, "dim", None),
        "epsilon_max": getattr(args, "epsilon_max", None),
        "base_degree": getattr(args, "base_degree", None),
        "max_exponent": getattr(args, "max_exponent", None),
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    count = getattr(args, "count", None)
    if count is not None:
        cfg.count = count
        cfg.probe_count = count
    return cfg


def _write(report, args, out):
    if args.json:
        emit(report, out)
    else:
        out.write(f"[{report.outcome}] {report.input} {json.dumps(report.payload)}\n")


def _sources(args):
    if args.expr is not None:
        return [(1, args.expr)]
    return read_expressions(args.file)


# ==========================================
# 명령
# ==========================================
def cmd_degree(args, cfg, out):
    def run(text):
        e = parse(text)
        result = degree(e, DegreeParams.from_config(cfg))
        return "ok", dict(result.to_dict(), dim=e.dim)

    reports = []
    for line, text in _sources(args):
        report = run_timed("degree", text, lambda: run(text), line)
        _write(report, args, out)
        reports.append(report)
    return 0 if all(r.ok for r in reports) else 1


def cmd_certify(args, cfg, out):
    # 플래그 오류도 줄 단위 레코드로 기록
    def run(text):
        result = certify_not_iterate(parse(text), DegreeParams.from_config(cfg)).to_dict()
        return ("ok" if result["kind"] == "certificate" else "refused"), result

    reports = []
    for line, text in _sources(args):
        report = run_timed("certify", text, lambda: run(text), line)
        _write(report, args, out)
        reports.append(report)
    # Refusal 은 오류가 아님
    return 0 if all(r.outcome in ("ok", "refused") for r in reports) else 1


def cmd_distance(args, cfg, out):
    def run():
        f, g = parse(args.a), parse(args.b)
        est = sup_distance(f, g, cfg.grid_resolution(f.dim), args.lipschitz)
        return "ok", dict(est.to_dict(), dim=f.dim)

    report = run_timed("distance", f"{args.a} | {args.b}", run)
    _write(report, args, out)
    return 0 if report.ok else 1


def cmd_homotopy(args, cfg, out):
    def run():
        f, g = parse(args.a), parse(args.b)
        rep = homotopy_check(f, g, cfg.grid_resolution(f.dim), cfg.t_steps)
        return "ok", dict(rep.to_dict(), dim=f.dim)

    report = run_timed("homotopy", f"{args.a} | {args.b}", run)
    _write(report, args, out)
    return 0 if report.ok else 1


def cmd_experiment(args, cfg, out):
    params = DegreeParams.from_config(cfg)
    samples = []
    for s in run_ball_experiment(
        cfg.dim,
        cfg.count,
        cfg.epsilon_max,
        cfg.seed,
        params=params,
        resolution=cfg.grid_resolution(cfg.dim),
        t_steps=cfg.t_steps,
        base_degree=cfg.base_degree,
        radius=cfg.ball_radius,
    ):
        samples.append(s)
        payload = dict(s.payload, index=s.index, seed=s.seed, epsilon=s.epsilon)
        _write(RunReport(s.expr, "experiment", s.outcome, payload, s.wall_ms), args, out)

    summary = summarize(samples)
    out.write(json.dumps({"command": "experiment", "summary": summary}) + "\n")
    logger.info(
        f"Experiment (m={cfg.dim}, count={cfg.count}, eps_max={cfg.epsilon_max}): "
        f"issued {summary['issued']}, refused {summary['refused']}, errors {summary['errors']}"
    )
    if args.plot:
        from utils.visualizer import plot_experiment

        plot_experiment(samples, args.plot, radius=cfg.ball_radius)
        logger.info(f"Graph saved to: {args.plot}")
    return 0 if summary["refused"] == summary["errors"] == 0 else 1


def cmd_probe(args, cfg, out):
    params = DegreeParams.from_config(cfg)
    samples = []
    for s in probe_iterates(
        cfg.dim,
        cfg.probe_count,
        cfg.seed,
        params=params,
        resolution=cfg.grid_resolution(cfg.dim),
        base_degree=cfg.base_degree,
        max_exponent=cfg.max_exponent,
        radius=cfg.ball_radius,
    ):
        samples.append(s)
        _write(RunReport(s.expr, "probe", s.outcome, dict(s.payload, index=s.index), s.wall_ms), args, out)

    summary = summarize(samples)
    out.write(json.dumps({"command": "probe", "summary": summary}) + "\n")
    logger.info(f"Probe (m={cfg.dim}): outside ball {summary['issued']}, violations {summary['refused']}, errors {summary['errors']}")
    return 0 if summary["refused"] == summary["errors"] == 0 else 1


COMMANDS = {
    "degree": cmd_degree,
    "certify": cmd_certify,
    "distance": cmd_distance,
    "homotopy": cmd_homotopy,
    "experiment": cmd_experiment,
    "probe": cmd_probe,
}


def main(argv=None, out=None):
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(levelname)s] %(message)s",
        stream=sys.stderr,
    )
    cfg = apply_args(Config(), args)
    try:
        return COMMANDS[args.command](args, cfg, out)
    except OSError as exc:
        logger.error(f"cannot read input: {exc}")
        return 1
    except SphereDegreeError as exc:
        # 실험 설정 자체가 잘못된 경우 (예: epsilon-max >= 1)
        logger.error(f"{exc.kind}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
