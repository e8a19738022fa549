import csv
import logging
import os
from app.errors import BsError
from app.group.words import height
from app.scenarios.scenario_base import ScenarioBase
from app.walks.lazy_walk import lazy_walk_stats
from app.walks.sampling import sample_walk, seed_sequence
from app.walks.valuations import valuation_trace

logger = logging.getLogger("ScenarioManager")

TRACE_FILE = "walk_trace.csv"


def write_trace(path, trace, products, valuations):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["step", "increment", "height", "valuation"])
        for step, nf in enumerate(products):
            increment = trace.increments[step - 1] if step else ""
            value = valuations[step] if step < len(valuations) else ""
            writer.writerow([step, increment, height(nf), value])


class Walk(ScenarioBase):
    help = "sample one walk and dump its trace; optionally estimate the lazy walk escape"

    def add_arguments(self, parser):
        self.add_experiment_arguments(parser)
        parser.add_argument("--p", dest="prime", type=int, help="prime q for the valuation column")
        parser.add_argument("--N0", dest="start_label", help="start label for the valuation column")
        parser.add_argument("--p-plus", dest="p_plus", help="lazy walk P(+1)")
        parser.add_argument("--p-minus", dest="p_minus", help="lazy walk P(-1)")

    def run(self, args):
        cfg = self.experiment_config(args, ("prime", "start_label", "p_plus", "p_minus"))
        params = cfg.params
        trace = sample_walk(cfg.measure, cfg.horizon, seed_sequence(cfg.seed, 0))
        products = trace.partial_products(params)

        summary = {"final_normal_form": str(products[-1]), "final_height": height(products[-1])}
        rows = [(cfg.horizon, "final_height", height(products[-1]))]

        valuations = ()
        if cfg.prime is not None and cfg.start_label is not None:
            try:
                vt = valuation_trace(params, cfg.prime, cfg.start_label, trace)
                valuations = vt.values
                summary["valuation_violation_index"] = vt.violation_index
                rows.append((len(vt.values) - 1, "valuation", vt.values[-1]))
            except BsError as e:
                logger.info(f"No valuation column: {type(e).__name__}: {e.reason}")
                summary["valuation_error"] = f"{type(e).__name__}: {e.reason}"

        if cfg.p_plus is not None or cfg.p_minus is not None:
            stats = lazy_walk_stats(cfg.p_plus or 0, cfg.p_minus or 0, cfg.trials, cfg.horizon, cfg.seed,
                                    workers=args.workers, batch_size=cfg.batch_size,
                                    log_interval=args.log_interval)
            summary["lazy_walk"] = stats._asdict()
            rows += [
                (cfg.horizon, "never_return_hat", stats.never_return_hat),
                (cfg.horizon, "drift_hat", stats.drift_hat),
                (cfg.horizon, "sigma", stats.sigma),
                (cfg.horizon, "undecided_fraction", stats.undecided_fraction),
                (cfg.horizon, "truncation_bound", stats.truncation_bound),
            ]

        os.makedirs(args.out, exist_ok=True)
        write_trace(os.path.join(args.out, TRACE_FILE), trace, products, valuations)
        self.write_report(args, "walk", cfg, summary, rows)
        print(summary["final_normal_form"])
        return 0
