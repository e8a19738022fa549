import os
import sys
import argparse
import logging
import psutil
from dotenv import load_dotenv
from app.errors import BsError

load_dotenv()

# Load run defaults from .env
LOG_LEVEL = os.getenv('LOG_LEVEL', 'ERROR').upper()
WORKERS = int(os.getenv('BS_WORKERS') or psutil.cpu_count(logical=False) or 1)
OUT_DIR = os.getenv('BS_OUT_DIR', 'reports')
LOG_INTERVAL = int(os.getenv('BS_LOG_INTERVAL', '60'))

# Convert the string level to the corresponding logging level
numeric_level = logging._nameToLevel.get(LOG_LEVEL, logging.ERROR)

# Configure logging
logging.basicConfig(
    level=numeric_level,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler()
    ]
)

logger = logging.getLogger("BsCli")


def build_parser():
    # Imported here so the scenario scan runs after logging is configured
    from app.global_vars import scenario_manager

    parser = argparse.ArgumentParser(
        prog="bs-dynamics",
        description="Normal forms, (m,n)-graphs, preactions and random walks on subgroups of BS(m,n).",
    )
    subparsers = parser.add_subparsers(dest="scenario", required=True)
    scenario_manager.register_commands(subparsers)
    return parser, scenario_manager


def main(argv=None):
    parser, scenario_manager = build_parser()
    args = parser.parse_args(argv)

    # Flags left unset fall back to the environment
    if getattr(args, "workers", None) is None:
        args.workers = WORKERS
    if getattr(args, "out", None) is None:
        args.out = OUT_DIR
    args.log_interval = LOG_INTERVAL

    scenario = scenario_manager.get(args.scenario)
    logger.debug(f"Running {args.scenario} with {args.workers} workers")
    try:
        return scenario.run(args)
    except BsError as e:
        print(f"{type(e).__name__}: {e.reason}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"IoError: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Program interrupted.")
