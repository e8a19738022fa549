import logging
from fractions import Fraction
from app.dynamics.experiments import ExperimentConfig
from app.errors import BadParams, ParseError
from app.group.words import Params
from app.processing.report_builder import build_report
from app.processing.text_formats import (
    parse_config, parse_graph, parse_label, parse_preaction
)
from app.walks.measures import StepMeasure

logger = logging.getLogger("ScenarioManager")

# Config-file keys accepted besides the ExperimentConfig field names
KEY_ALIASES = {
    "p": "prime",
    "q": "prime",
    "N": "start_label",
    "N0": "start_label",
    "M": "target_label",
    "R": "radius",
    "k": "ks",
}

INT_KEYS = {
    "m", "n", "trials", "horizon", "seed", "prime", "radius", "calibration_walks",
    "neighborhood", "audit_trials", "audit_horizon", "batch_size", "smoothing_window",
}
LABEL_KEYS = {"start_label", "target_label"}
FRACTION_KEYS = {"p_plus", "p_minus"}


def read_text(path):
    with open(path) as handle:
        return handle.read()


def convert_setting(key, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in INT_KEYS:
            return int(value)
        if key in LABEL_KEYS:
            return parse_label(value)
        if key in FRACTION_KEYS:
            return Fraction(value)
        if key == "epsilon":
            return float(value)
        if key == "ks":
            return tuple(int(k) for k in value.split(",") if k)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad value {value!r} for {key}")
    raise ParseError(f"unknown config key {key!r}")


class ScenarioBase:
    """A CLI scenario: declares its flags and runs from the parsed arguments."""

    help = ""
    experiment = False

    def add_arguments(self, parser):
        pass

    def run(self, args):
        raise NotImplementedError("Subclasses must implement this method")

    # Shared flags

    @staticmethod
    def add_group_arguments(parser, required=True):
        parser.add_argument("--m", type=int, required=required)
        parser.add_argument("--n", type=int, required=required)

    @staticmethod
    def add_experiment_arguments(parser):
        parser.add_argument("--m", type=int)
        parser.add_argument("--n", type=int)
        parser.add_argument("--seed", type=int)
        parser.add_argument("--trials", type=int)
        parser.add_argument("--horizon", type=int)
        parser.add_argument("--config", help="key-value file; overrides flags")
        parser.add_argument("--archive", action="store_true",
                            help="also write a msgpack+zstd archive of the report")
        ScenarioBase.add_run_arguments(parser)

    @staticmethod
    def params_of(args):
        if args.m is None or args.n is None:
            raise BadParams("--m and --n are required")
        return Params(args.m, args.n)

    def experiment_config(self, args, fields, **overrides):
        """Defaults < flags < config file, for the ExperimentConfig fields named in `fields`."""
        settings = {"m": args.m, "n": args.n}
        for name in ("seed", "trials", "horizon", *fields):
            value = getattr(args, name, None)
            if value is not None:
                settings[name] = value
        settings.update({k: v for k, v in overrides.items() if v is not None})

        atoms = []
        if getattr(args, "config", None):
            file_settings, atoms = parse_config(read_text(args.config))
            for key, value in file_settings.items():
                settings[KEY_ALIASES.get(key, key)] = value

        resolved = {key: convert_setting(key, value) for key, value in settings.items()}
        if resolved.get("m") is None or resolved.get("n") is None:
            raise BadParams("m and n are required")
        params = Params(resolved.pop("m"), resolved.pop("n"))
        measure = StepMeasure.from_mapping(atoms) if atoms else StepMeasure.uniform()
        resolved = {key: value for key, value in resolved.items() if value is not None}
        try:
            return ExperimentConfig(params=params, measure=measure, **resolved)
        except TypeError as e:
            raise ParseError(f"bad config: {e}")

    @staticmethod
    def load_graph(path, params=None):
        graph_params, g = parse_graph(read_text(path))
        if params is not None and graph_params != params:
            raise BadParams(f"{path} is a graph for {graph_params}, not {params}")
        return graph_params, g

    @staticmethod
    def load_preaction(path, params=None):
        preaction_params, a = parse_preaction(read_text(path))
        if params is not None and preaction_params != params:
            raise BadParams(f"{path} is a preaction for {preaction_params}, not {params}")
        return preaction_params, a

    @staticmethod
    def add_run_arguments(parser):
        parser.add_argument("--workers", type=int, help="parallel trial workers")
        parser.add_argument("--out", help="report directory")

    @staticmethod
    def write_report(args, scenario, cfg, summary, rows):
        return build_report(args.out, scenario, cfg.as_dict(), summary, rows, archive=args.archive)
