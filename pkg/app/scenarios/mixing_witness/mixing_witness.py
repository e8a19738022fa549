from app.dynamics.experiments import mixing_witness_experiment
from app.errors import BadParams
from app.scenarios.scenario_base import ScenarioBase


class Mixing_witness(ScenarioBase):
    help = "frequency with which walks paste the balls of two cores, per walk length k"

    def add_arguments(self, parser):
        self.add_experiment_arguments(parser)
        parser.add_argument("--core1", required=True, help="(m,n)-graph file with a root")
        parser.add_argument("--core2", required=True, help="(m,n)-graph file with a root")
        parser.add_argument("--radius", type=int)
        parser.add_argument("--ks", help="comma separated walk lengths")
        parser.add_argument("--epsilon")

    def run(self, args):
        cfg = self.experiment_config(args, ("radius", "ks", "epsilon"),
                                     extra={"core1": args.core1, "core2": args.core2})
        if not cfg.ks or min(cfg.ks) < 1:
            raise BadParams("ks must be positive walk lengths")
        _, core1 = self.load_graph(args.core1, cfg.params)
        _, core2 = self.load_graph(args.core2, cfg.params)
        report = mixing_witness_experiment(cfg, core1, core2, workers=args.workers,
                                           log_interval=args.log_interval)

        rows = []
        for k in cfg.ks:
            rows.append((k, "success", report.success_by_k[k]))
            rows.append((k, "check_rate", report.check_rate_by_k[k]))
            rows.append((k, "paste_failures", report.paste_failures_by_k[k]))
        self.write_report(args, "mixing_witness", cfg, report._asdict(), rows)
        print(" ".join(f"{k}:{report.success_by_k[k]}" for k in cfg.ks))
        return 0
