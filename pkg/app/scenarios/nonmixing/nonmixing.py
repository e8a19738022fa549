from app.dynamics.experiments import nonmixing_experiment
from app.scenarios.scenario_base import ScenarioBase

STATISTICS = (
    "never_return_hat", "bound", "sigma", "drift_hat", "expected_drift", "walk_drift_hat",
    "undecided_fraction", "truncation_bound", "audit_certificates_fired", "audit_failures",
)


class Nonmixing(ScenarioBase):
    help = "estimate the non-mixing lower bound p+ - p- along a biased walk"

    def add_arguments(self, parser):
        self.add_experiment_arguments(parser)
        parser.add_argument("--p", dest="prime", type=int, help="prime q with v_q(m) != v_q(n)")
        parser.add_argument("--N", dest="start_label", help="label of the basic open set U_N")
        parser.add_argument("--M", dest="target_label", help="label of the target set U_M (default N)")

    def run(self, args):
        cfg = self.experiment_config(args, ("prime", "start_label", "target_label"))
        report = nonmixing_experiment(cfg, workers=args.workers, log_interval=args.log_interval)
        rows = [(cfg.horizon, name, getattr(report, name)) for name in STATISTICS]
        self.write_report(args, "nonmixing", cfg, report._asdict(), rows)
        print(f"never_return_hat {report.never_return_hat} bound {report.bound} check {report.bound_check}")
        return 0
