from __future__ import annotations

import argparse
import io
import json
import logging
import sys

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .core.bounds import theorem1_bound
from .core.config import Config
from .core.converters import NoExitParser, finite_float, float_list, node_strategy, positive_int
from .core.counterexample import (
    CounterexampleSpec,
    LinearSystem,
    box_scale,
    build_complex_spec,
    build_spec,
    build_system,
    certified_zero_count,
    derivative_gap,
    make_nodes,
)
from .core.enums import NodeStrategy
from .core.errors import CertificationError, InvalidArgument, InvariantViolation, OscilabError
from .core.experiments import run_demo, run_stress, write_rows
from .core.models import DemoRow, TrialRecord, configure_logging, getLogger
from .core.ode import count_hyperplane_crossings, count_sign_changes, integrate_linear
from .core.utils import format_float, human_join


info_json = Path(__file__).parent.resolve() / "info.json"
with open(info_json, encoding="utf-8") as f:
    __plugin_info__ = json.loads(f.read())

__plugin_name__ = __plugin_info__["name"]
__version__ = __plugin_info__["version"]
__description__ = "\n".join(__plugin_info__["description"]).format(__version__)

logger = getLogger(__name__)


EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

# command line option -> config key
_overrides = (
    "margin",
    "node_strategy",
    "rtol",
    "atol",
    "zero_tol",
    "epsilon",
    "delta",
    "trials",
    "n_max",
    "seed",
    "d_max",
    "jobs",
)


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


class Oscilab:
    __doc__ = __description__

    def __init__(self, config: Config, out: Optional[Path] = None):
        self.config: Config = config
        self.out: Optional[Path] = out

    def emit(self, text: str) -> None:
        """Writes a product to `--out` when given, stdout otherwise."""
        if self.out is None:
            sys.stdout.write(text)
            return
        self.out.parent.mkdir(parents=True, exist_ok=True)
        self.out.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {self.out}.")

    def _nodes(self, args: argparse.Namespace):
        strategy = args.strategy
        if strategy is None:
            strategy = (
                NodeStrategy.EXPLICIT
                if args.nodes is not None
                else NodeStrategy.from_value(self.config.get("node_strategy"))
            )
        return make_nodes(args.d, strategy, explicit=args.nodes, grid_bits=self.config.get("node_grid_bits"))

    def construct(self, args: argparse.Namespace) -> int:
        """
        Builds and certifies one counterexample, writes its spec and system JSON to the
        `--out` directory and prints the certificate summary.
        """
        config = self.config
        spec = build_spec(
            self._nodes(args),
            config.get("margin"),
            enclosure_tol=config.get("enclosure_tol"),
            certificate_tol_factor=config.get("certificate_tol_factor"),
        )
        system = build_system(spec)
        zeros = certified_zero_count(spec)
        gap = derivative_gap(spec)

        directory = self.out or Path(".")
        directory.mkdir(parents=True, exist_ok=True)
        spec_path = directory / f"spec_d{spec.d}.json"
        system_path = directory / f"system_d{spec.d}.json"
        spec_path.write_text(_dump(spec.to_json()), encoding="utf-8")
        system_path.write_text(_dump(system.to_json()), encoding="utf-8")
        logger.info(f"Wrote {human_join([str(spec_path), str(system_path)])}.")

        summary = {
            "d": spec.d,
            "lambda": spec.lam,
            "norm_lower": spec.norm_certificate.lower,
            "norm_upper": spec.norm_certificate.upper,
            "zeros_certified": zeros,
            "scalar_bound": gap.scalar_bound,
            "phi1_lower": gap.phi1_lower,
            "phi1_zeros": gap.phi1_zeros,
            "system_height": system.height(),
            "box_scale": box_scale(spec),
        }
        sys.stdout.write("".join(f"{key}={_text(value)}\n" for key, value in summary.items()))
        if zeros != spec.d:
            raise InvariantViolation(f"Certified zero count {zeros} differs from d={spec.d}.")
        return EXIT_OK

    def demo(self, args: argparse.Namespace) -> int:
        rows = run_demo(self.config.get("d_max"), self.config, jobs=self.config.get("jobs"))
        self.emit(_csv(DemoRow.header(), [row.as_tuple() for row in rows]))
        problems = [f"d={row.d}: {problem}" for row in rows for problem in row.violations()]
        if problems:
            raise InvariantViolation("; ".join(problems))
        return EXIT_OK

    def stress(self, args: argparse.Namespace) -> int:
        config = self.config
        records, report = run_stress(
            config.get("trials"), config.get("n_max"), config.get("seed"), config, jobs=config.get("jobs")
        )
        if self.out is not None:
            self.emit(_csv(TrialRecord.header(), [record.as_tuple() for record in records]))
        sys.stdout.write(_dump(report.to_dict()))
        report.check()
        return EXIT_OK

    def bound(self, args: argparse.Namespace) -> int:
        sys.stdout.write(format_float(theorem1_bound(args.n, args.C, args.alpha, args.beta)) + "\n")
        return EXIT_OK

    def complex(self, args: argparse.Namespace) -> int:
        spec = build_complex_spec(self._nodes(args), self.config.get("epsilon"), self.config.get("delta"))
        zeros = certified_zero_count(spec)
        logger.info(f"Complex neighbourhood spec keeps {zeros} certified zeros.")
        self.emit(_dump(spec.to_json()))
        if zeros != spec.d:
            raise InvariantViolation(f"Certified zero count {zeros} differs from d={spec.d}.")
        return EXIT_OK

    def count(self, args: argparse.Namespace) -> int:
        try:
            payload = json.loads(Path(args.system).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidArgument(f"Cannot read system file {args.system!r}: {exc}.") from exc
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"System file {args.system!r} is not valid JSON.") from exc
        system = _load_system(payload)
        alpha = system.domain[0] if args.alpha is None else args.alpha
        beta = system.domain[1] if args.beta is None else args.beta
        sol = integrate_linear(system, args.x0, (alpha, beta), self.config.integrator_config())
        zero_tol = self.config.get("zero_tol")
        if args.normal is not None:
            report = count_hyperplane_crossings(sol, args.normal, zero_tol=zero_tol)
        else:
            report = count_sign_changes(sol, args.component, zero_tol=zero_tol)
        if self.out is not None:
            sol.to_csv(self.out, num=args.samples)
            logger.info(f"Wrote {self.out}.")
        sys.stdout.write(_dump(report.to_json()))
        return EXIT_OK


def _text(value: Any) -> str:
    return format_float(value) if isinstance(value, float) else str(value)


def _csv(header: Sequence[str], rows: List[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    write_rows(buffer, header, rows)
    return buffer.getvalue()


def _load_system(payload: Dict[str, Any]) -> LinearSystem:
    """A system file, or a spec file whose system is then built."""
    if isinstance(payload, dict) and "entries" in payload:
        return LinearSystem.from_json(payload)
    if isinstance(payload, dict) and "lambda" in payload:
        return build_system(CounterexampleSpec.from_json(payload))
    raise InvalidArgument("Expected a system or counterexample JSON object.")


def build_parser() -> argparse.ArgumentParser:
    common = NoExitParser(add_help=False)
    common.add_argument("--config", help="YAML file overriding the default configuration.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log debug details to stderr.")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Log warnings and errors only.")

    nodes = NoExitParser(add_help=False)
    nodes.add_argument("--d", type=int, help="Number of nodes (zeros of a).")
    nodes.add_argument("--strategy", type=node_strategy, help="chebyshev, uniform or explicit-list.")
    nodes.add_argument("--nodes", help="Explicit comma separated nodes in [-1, 1].")

    integrator = NoExitParser(add_help=False)
    integrator.add_argument("--rtol", type=finite_float)
    integrator.add_argument("--atol", type=finite_float)
    integrator.add_argument("--zero-tol", dest="zero_tol", type=finite_float)
    integrator.add_argument("--jobs", type=positive_int, help="Worker processes.")

    parser = NoExitParser(prog="oscilab", description=__description__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    construct = sub.add_parser(
        "construct", parents=[common, nodes], help="Build one certified counterexample."
    )
    construct.add_argument("--margin", type=finite_float)
    construct.add_argument("--out", type=Path, help="Directory for the spec and system JSON files.")

    demo = sub.add_parser(
        "demo", parents=[common, integrator], help="Certified vs numeric zeros for d = 1..d_max."
    )
    demo.add_argument("--d-max", dest="d_max", type=int)
    demo.add_argument("--strategy", dest="node_strategy", type=node_strategy)
    demo.add_argument("--margin", type=finite_float)
    demo.add_argument("--out", type=Path, help="CSV file (stdout when omitted).")

    stress = sub.add_parser("stress", parents=[common, integrator], help="Seeded Theorem 1 stress test.")
    stress.add_argument("--trials", type=positive_int)
    stress.add_argument("--n-max", dest="n_max", type=int)
    stress.add_argument("--seed", type=int)
    stress.add_argument("--out", type=Path, help="CSV file of the individual trials.")

    bound = sub.add_parser("bound", parents=[common], help="Theorem 1 zero-count bound.")
    bound.add_argument("--n", type=int, required=True)
    bound.add_argument("--C", "-C", dest="C", type=finite_float, default=1.0)
    bound.add_argument("--alpha", type=finite_float, default=-1.0)
    bound.add_argument("--beta", type=finite_float, default=1.0)

    complex_ = sub.add_parser(
        "complex", parents=[common, nodes], help="Counterexample small on a complex disk."
    )
    complex_.add_argument("--epsilon", type=finite_float)
    complex_.add_argument("--delta", type=finite_float)
    complex_.add_argument("--out", type=Path, help="JSON file (stdout when omitted).")

    count = sub.add_parser(
        "count", parents=[common, integrator], help="Integrate a system and count zeros."
    )
    count.add_argument("--system", required=True, help="System (or spec) JSON file.")
    count.add_argument("--x0", type=float_list, required=True)
    target = count.add_mutually_exclusive_group()
    target.add_argument("--component", type=int, default=0, help="Zero-based component index.")
    target.add_argument("--normal", type=float_list, help="Count zeros of <normal, x>.")
    count.add_argument("--alpha", type=finite_float)
    count.add_argument("--beta", type=finite_float)
    count.add_argument("--samples", type=positive_int, default=201, help="Rows of the trajectory CSV.")
    count.add_argument("--out", type=Path, help="Trajectory CSV file.")
    return parser


def _configure(args: argparse.Namespace) -> Config:
    if args.verbose:
        configure_logging(logging.DEBUG)
    elif args.quiet:
        configure_logging(logging.WARNING)
    else:
        configure_logging(logging.INFO)
    config = Config.from_env(args.config)
    overrides = {key: getattr(args, key, None) for key in _overrides}
    if isinstance(overrides.get("node_strategy"), NodeStrategy):
        overrides["node_strategy"] = overrides["node_strategy"].value
    config.update(overrides)
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except InvalidArgument as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"oscilab: error: {exc}\n")
        return EXIT_USAGE

    try:
        config = _configure(args)
        app = Oscilab(config, out=getattr(args, "out", None))
        return getattr(app, args.command)(args)
    except InvalidArgument as exc:
        logger.error(str(exc))
        return EXIT_USAGE
    except (CertificationError, InvariantViolation) as exc:
        logger.error(str(exc))
        return EXIT_VIOLATION
    except OscilabError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_VIOLATION
