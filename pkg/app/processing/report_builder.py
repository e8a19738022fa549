import csv
import json
import logging
import math
import os
import random
from fractions import Fraction
import coolname
import msgpack
import numpy as np
import zstandard as zstd
from app.errors import BsError

logger = logging.getLogger("ReportBuilder")


def plain(value):
    """Converts numpy scalars, fractions and infinities into JSON/msgpack-safe values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return None
        return value
    return value


def run_name(seed):
    """A readable name that only depends on the seed."""
    coolname.replace_random(random.Random(seed))
    return coolname.generate_slug(3)


def write_csv(path, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["k", "statistic", "value"])
        for k, statistic, value in rows:
            writer.writerow([k, statistic, plain(value)])


def pack_archive(payload):
    """msgpack-serialize and Zstandard-compress a report payload."""
    try:
        serialized = msgpack.packb(payload)
        logger.debug(f"Serialized report size: {len(serialized)} bytes")
    except (TypeError, ValueError) as e:
        logger.error(f"Error during serialization: {e}")
        raise BsError(f"report archive not serializable: {e}") from e

    try:
        compressor = zstd.ZstdCompressor(level=3)
        compressed = compressor.compress(serialized)
        logger.debug(f"Compressed report size: {len(compressed)} bytes")
    except zstd.ZstdError as e:
        logger.error(f"Error during compression: {e}")
        raise BsError(f"report archive not compressible: {e}") from e
    return compressed


def unpack_archive(data):
    return msgpack.unpackb(zstd.ZstdDecompressor().decompress(data))


def build_report(out_dir, scenario, config, summary, rows=(), archive=False):
    """
    Writes <scenario>.csv (k, statistic, value rows) and <scenario>.json
    (summary plus the resolved config), and <scenario>.msgpack.zst when
    `archive` is set. Returns the paths written.
    """
    os.makedirs(out_dir, exist_ok=True)
    rows = list(rows)
    payload = {
        "scenario": scenario,
        "run_name": run_name(config.get("seed", 0)),
        "config": plain(config),
        "summary": plain(summary),
    }

    paths = {}
    paths["csv"] = os.path.join(out_dir, f"{scenario}.csv")
    write_csv(paths["csv"], rows)

    paths["json"] = os.path.join(out_dir, f"{scenario}.json")
    with open(paths["json"], "w") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")

    if archive:
        payload["rows"] = [[plain(k), statistic, plain(value)] for k, statistic, value in rows]
        compressed = pack_archive(payload)
        paths["archive"] = os.path.join(out_dir, f"{scenario}.msgpack.zst")
        with open(paths["archive"], "wb") as handle:
            handle.write(compressed)

    logger.info(f"Report {payload['run_name']} written to {out_dir}")
    return paths
