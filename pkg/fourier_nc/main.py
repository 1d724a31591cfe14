"""
Fourier-NC command-line entry point
Network coordination over finite groups: spectra, simulated sampling, solvers and analytics
"""
import argparse
import logging
import sys
from typing import List, Optional

from fourier_nc.commands import COMMANDS
from fourier_nc.config import settings, validate_settings
from fourier_nc.exceptions import FourierNCError

logger = logging.getLogger(__name__)


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1"""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(parser: argparse.ArgumentParser, instance: bool = False) -> None:
    if instance:
        parser.add_argument("instance", help="instance JSON file")
    parser.add_argument("--seed", type=int, default=settings.default_seed,
                        help=f"random seed (default {settings.default_seed})")
    parser.add_argument("--format", choices=["text", "csv"], default="text", help="report format")
    parser.add_argument("--output", "-o", default=None, help="output file (default stdout)")
    parser.add_argument("--threads", type=int, default=settings.threads, help="worker threads; results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = CommandParser(prog="fourier-nc", description=__doc__,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (logs go to stderr)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CommandParser)

    p = sub.add_parser("solve", help="solve an instance (Fourier pipeline by default)")
    _common(p, instance=True)
    p.add_argument("--hybrid", action="store_true", help="exact C^beta hybrid solver (frustrated instances)")
    p.add_argument("--oracle", action="store_true", help="compare against the brute-force optimum")
    p.add_argument("--delta", type=float, default=settings.delta, help="failure probability for the coupon bound")

    p = sub.add_parser("frustration", help="holonomy report and gap bound")
    _common(p, instance=True)

    p = sub.add_parser("spectrum", help="export per-edge spectra as JSON")
    _common(p, instance=True)

    p = sub.add_parser("sample", help="draw T simulated measurements")
    _common(p, instance=True)
    p.add_argument("--T", type=int, required=True, help="number of draws")
    p.add_argument("--conditional", action="store_true", help="draw from the non-zero-mode law")

    p = sub.add_parser("converge", help="Monte-Carlo mode-recovery curve")
    _common(p, instance=True)
    p.add_argument("--max-T", dest="max_T", type=int, default=60)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--raw", action="store_true", help="count raw measurements, zero mode included")

    p = sub.add_parser("gates", help="gate-count projection (all four reference rows when --n is omitted)")
    _common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None, help="edges (default complete graph)")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--C", type=int, default=64)
    p.add_argument("--dihedral", action="store_true", help="add the D_C per-repetition count")

    p = sub.add_parser("adversary", help="classical query lower bound next to Grover iterations")
    _common(p)
    p.add_argument("--n", default="1..10", help="range '1..10' or list '1,5,10'")
    p.add_argument("--C", type=int, default=4)

    p = sub.add_parser("reduce-maxcut", help="MAX-CUT graph -> C=2 instance JSON")
    _common(p)
    p.add_argument("--edges", required=True, help="edge list '0-1,1-2,0-2'")
    p.add_argument("--nodes", type=int, default=None)

    p = sub.add_parser("validate", help="numerical validation harness over five topologies")
    _common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--C", type=int, default=32)

    p = sub.add_parser("sk-table", help="S_k query-complexity table")
    _common(p)
    p.add_argument("--k", default="3,5,7,10,15", help="range '3..15' or list '3,5,7'")
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--r", type=int, default=3)

    p = sub.add_parser("ecc", help="extremal conjugacy class experiment")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("characters", help="integer character table of S_k as CSV")
    _common(p)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("abelian", help="abelian index of Z_C, D_C or S_k")
    _common(p)
    p.add_argument("--group", required=True, help="descriptor such as Z12, D8, S5")
    p.add_argument("--mode", choices=["exact", "brute", "formula"], default="exact")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        validate_settings()
        if getattr(args, "threads", 1) < 1:
            raise ValueError("--threads must be >= 1")
        return COMMANDS[args.command](args)
    except FourierNCError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_status
    except (OSError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
