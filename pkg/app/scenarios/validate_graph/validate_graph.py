import json
from app.errors import BsError
from app.group.graphs import graph_phenotype, validate
from app.group.labels import format_label
from app.processing.report_builder import plain
from app.scenarios.scenario_base import ScenarioBase


def validation_summary(params, g):
    report = validate(params, g)
    summary = {
        "params": str(params),
        "vertices": len(g.labels),
        "edges": len(g.edges),
        "valid": report.valid,
        "connected": report.connected,
        "saturated": report.saturated,
        "degree_violations": [v._asdict() for v in report.degree_violations],
        "transfer_violations": [v._asdict() for v in report.transfer_violations],
    }
    if report.valid and report.connected:
        try:
            summary["phenotype"] = format_label(graph_phenotype(params, g))
        except BsError as e:
            summary["phenotype"] = f"{type(e).__name__}: {e.reason}"
        summary["perfect_kernel_member"] = not report.saturated
    return summary


class Validate_graph(ScenarioBase):
    help = "check degree caps and the Transfer Equation of an (m,n)-graph file"

    def add_arguments(self, parser):
        parser.add_argument("--graph", required=True)
        self.add_group_arguments(parser, required=False)

    def run(self, args):
        params = self.params_of(args) if args.m is not None or args.n is not None else None
        params, g = self.load_graph(args.graph, params)
        print(json.dumps(plain(validation_summary(params, g)), sort_keys=True, indent=2))
        return 0
