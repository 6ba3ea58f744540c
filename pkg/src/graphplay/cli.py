"""Command line front door: serve, simulate, grade, gen-code."""

import argparse
import secrets
import sys

CODE_ALPHABET = "ABCDEFGHJKMNPQRSTUVWXYZ23456789"  # read-aloud friendly


def gen_code(length=6):
    return "".join(secrets.choice(CODE_ALPHABET) for _ in range(length))


def build_parser():
    parser = argparse.ArgumentParser(prog="graphplay")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the classroom server")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", required=True)
    serve.add_argument("--professor-secret", required=True)
    serve.add_argument("--max-body-bytes", type=int, default=1_000_000)
    serve.add_argument("--snapshot-every", type=int, default=100)
    serve.add_argument(
        "--code-case-sensitive", action="store_true",
        help="match game codes exactly instead of ignoring case",
    )

    sim = sub.add_parser("simulate", help="drive a live server with virtual students")
    sim.add_argument("--server", required=True, help="base URL, e.g. http://127.0.0.1:8000")
    sim.add_argument("--students", type=int, default=30)
    sim.add_argument("--secret", required=True, help="professor secret on that server")
    sim.add_argument("--profile", choices=["all", "half-drop"], default="all")
    sim.add_argument("--advance-mode", choices=["professor_triggered", "individual"],
                     default="professor_triggered")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--timeout", type=float, default=60.0)

    grade = sub.add_parser("grade", help="grade stored answer files offline")
    grade.add_argument("--answers", required=True, help="directory of *.json answers")
    grade.add_argument("--reference", required=True, help="reference game/diagram file")

    gen = sub.add_parser("gen-code", help="print a fresh game code")
    gen.add_argument("--length", type=int, default=6)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        from .server import ServerConfig, serve as run_server

        run_server(
            ServerConfig(
                listen_port=args.port,
                host=args.host,
                data_dir=args.data_dir,
                professor_secret=args.professor_secret,
                max_body_bytes=args.max_body_bytes,
                snapshot_every=args.snapshot_every,
                code_case_insensitive=not args.code_case_sensitive,
            )
        )
        return 0

    if args.command == "simulate":
        from .simulate import (
            ALL_SUBMIT,
            HALF_DROP,
            SimulationConfig,
            print_report,
            simulate_classroom,
        )

        report = simulate_classroom(
            SimulationConfig(
                server_url=args.server,
                students=args.students,
                professor_secret=args.secret,
                profile=HALF_DROP if args.profile == "half-drop" else ALL_SUBMIT,
                advance_mode=args.advance_mode,
                seed=args.seed,
                timeout=args.timeout,
            )
        )
        print_report(report)
        return 0 if report.ok else 1

    if args.command == "grade":
        from .batchgrade import batch_grade

        return batch_grade(args.answers, args.reference)

    if args.command == "gen-code":
        print(gen_code(args.length))
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
