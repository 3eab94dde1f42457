import argparse
import logging
import sys

from .export import (
    DEFAULT_EST_SIZE,
    DEFAULT_MIN_SAMPLES,
    DEFAULT_TEST_SIZE,
    ExportJob,
    export_log,
    export_pool,
)
from .zoo import ModelNotFoundError, list_models


def build_parser():
    parser = argparse.ArgumentParser(
        prog="uql-export",
        description="Run a zoo classifier over an image folder, emit UQL1 "
                    "logs or C-OOD pool tables",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", required=True,
                       help=f"zoo model name ({', '.join(list_models())})")
        p.add_argument("--data", required=True, help="image folder root")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--batch-size", type=int, default=64)
        p.add_argument("--device", default="cpu")
        p.add_argument("--seed", type=int, default=0)

    p_log = sub.add_parser("log", help="export a UQL1 prediction log")
    common(p_log)
    p_log.add_argument("--passes", type=int, default=1, choices=(1, 30),
                       help="forward passes; 30 enables dropout sampling")

    p_pool = sub.add_parser("pool", help="export a per-class pool table CSV")
    common(p_pool)
    p_pool.add_argument("--manifest", default=None,
                        help="file with one class name per line (default: all)")
    p_pool.add_argument("--min-samples", type=int, default=DEFAULT_MIN_SAMPLES)
    p_pool.add_argument("--est-size", type=int, default=DEFAULT_EST_SIZE)
    p_pool.add_argument("--test-size", type=int, default=DEFAULT_TEST_SIZE)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "log":
            job = ExportJob(args.model, args.data, args.out, args.passes,
                            args.batch_size, args.device, args.seed)
            export_log(job)
        else:
            job = ExportJob(args.model, args.data, args.out, 1,
                            args.batch_size, args.device, args.seed)
            manifest = None
            if args.manifest:
                with open(args.manifest) as fh:
                    manifest = [line.strip() for line in fh if line.strip()]
            export_pool(job, manifest, args.min_samples, args.est_size,
                        args.test_size)
    except (ModelNotFoundError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
