from app.errors import BadParams
from app.group.graphs import enumerate_phenotypes, phenotype
from app.group.labels import format_label
from app.processing.text_formats import parse_label
from app.scenarios.scenario_base import ScenarioBase


class Phenotype(ScenarioBase):
    help = "phenotype of a label, or every phenotype of labels up to a bound"

    def add_arguments(self, parser):
        self.add_group_arguments(parser)
        parser.add_argument("--N", dest="label", help="positive integer or inf")
        parser.add_argument("--bound", type=int)

    def run(self, args):
        params = self.params_of(args)
        if (args.label is None) == (args.bound is None):
            raise BadParams("give exactly one of --N and --bound")
        if args.label is not None:
            print(format_label(phenotype(params, parse_label(args.label))))
        else:
            found = sorted(enumerate_phenotypes(params, args.bound))
            print(" ".join(format_label(ph) for ph in found))
        return 0
