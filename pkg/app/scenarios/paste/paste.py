import os
from app.dynamics.kernel import perfect_kernel_member
from app.dynamics.pasting import MergeInput, check_merge_hypotheses, paste
from app.group.graphs import graph_phenotype
from app.group.labels import format_label
from app.group.preactions import mn_graph_of
from app.group.words import reduce
from app.processing.report_builder import build_report
from app.processing.text_formats import format_preaction, parse_word
from app.scenarios.scenario_base import ScenarioBase

PREACTION_FILE = "paste.preaction"


class Paste(ScenarioBase):
    help = "paste two preactions along s1 s2 s3 and write the result"

    def add_arguments(self, parser):
        parser.add_argument("--pre1", required=True, help="preaction file with basepoint x1")
        parser.add_argument("--pre2", required=True, help="preaction file with basepoint x2")
        parser.add_argument("--s1", required=True)
        parser.add_argument("--s2", required=True)
        parser.add_argument("--s3", required=True)
        parser.add_argument("--archive", action="store_true")
        self.add_run_arguments(parser)

    def run(self, args):
        params, pre1 = self.load_preaction(args.pre1)
        _, pre2 = self.load_preaction(args.pre2, params)
        words = {name: parse_word(getattr(args, name)) for name in ("s1", "s2", "s3")}
        merge = MergeInput(pre1, pre2, *(reduce(params, words[name]) for name in ("s1", "s2", "s3")))

        check = check_merge_hypotheses(params, merge)
        result = paste(params, merge, check=check)
        g = mn_graph_of(result.preaction)

        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, PREACTION_FILE)
        with open(path, "w") as handle:
            handle.write(format_preaction(params, result.preaction))

        config = {"m": params.m, "n": params.n, "pre1": args.pre1, "pre2": args.pre2, **words}
        summary = {
            "orbits": len(result.preaction.labels),
            "edges": len(result.preaction.edges),
            "target": list(result.target),
            "bridge": list(result.bridge),
            "bridge_label": format_label(result.bridge_label),
            "phenotype": format_label(graph_phenotype(params, g)),
            "perfect_kernel_member": perfect_kernel_member(params, g),
            "distance": check.distance,
            "depth1": check.depth1,
            "depth2": check.depth2,
        }
        rows = [(len(result.bridge), "bridge_orbits", len(result.bridge))]
        build_report(args.out, "paste", config, summary, rows, archive=args.archive)
        print(path)
        return 0
