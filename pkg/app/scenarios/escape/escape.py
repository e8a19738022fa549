from app.dynamics.experiments import escape_experiment
from app.scenarios.scenario_base import ScenarioBase


class Escape(ScenarioBase):
    help = "occupancy of a finite core along walks and last-visit quantiles"

    def add_arguments(self, parser):
        self.add_experiment_arguments(parser)
        parser.add_argument("--graph", required=True, help="(m,n)-graph file of the core")

    def run(self, args):
        cfg = self.experiment_config(args, (), extra={"graph": args.graph})
        _, g = self.load_graph(args.graph, cfg.params)
        report = escape_experiment(cfg, g, workers=args.workers, log_interval=args.log_interval)

        rows = [(k, "occupancy", value) for k, value in enumerate(report.occupancy)]
        rows += [(cfg.horizon, f"last_visit_q{q}", value) for q, value in report.last_visit_quantiles.items()]
        rows.append((cfg.horizon, "censored_fraction", report.censored_fraction))
        summary = report._asdict()
        del summary["occupancy"]
        self.write_report(args, "escape", cfg, summary, rows)
        print(f"censored_fraction {report.censored_fraction}")
        return 0
