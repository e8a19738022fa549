from app.group.words import reduce
from app.processing.text_formats import parse_word
from app.scenarios.scenario_base import ScenarioBase


class Reduce(ScenarioBase):
    help = "print the normal form of a word"

    def add_arguments(self, parser):
        self.add_group_arguments(parser)
        parser.add_argument("--word", required=True, help="word over b, B, t, T; b^-3 shorthand allowed")

    def run(self, args):
        params = self.params_of(args)
        print(reduce(params, parse_word(args.word)))
        return 0
