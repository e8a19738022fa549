import os
import importlib
import logging
from dotenv import load_dotenv
from app.scenarios.scenario_base import ScenarioBase

logger = logging.getLogger("ScenarioManager")


class ScenarioManager:
    def __init__(self, scenarios_directory=None):
        load_dotenv()
        self.scenarios_directory = scenarios_directory or os.path.dirname(os.path.abspath(__file__))
        self.scenarios = {}

        # Every scenario is enabled unless ENABLED_SCENARIOS narrows the list
        enabled_scenarios = os.getenv('ENABLED_SCENARIOS', '')
        self.enabled_scenarios = [s.strip() for s in enabled_scenarios.split(',') if s.strip()]
        self.load_scenarios()

    def load_scenarios(self):
        # Load scenarios dynamically from the package directory
        for scenario_name in sorted(os.listdir(self.scenarios_directory)):
            scenario_path = os.path.join(self.scenarios_directory, scenario_name)
            if not os.path.isdir(scenario_path) or scenario_name.startswith("__"):
                continue
            if self.enabled_scenarios and scenario_name not in self.enabled_scenarios:
                continue

            entry_file = os.path.join(scenario_path, f"{scenario_name}.py")
            if os.path.isfile(entry_file):
                module_name = f"app.scenarios.{scenario_name}.{scenario_name}"
                module = importlib.import_module(module_name)

                # Capitalize the class name and ensure it's a subclass of ScenarioBase
                scenario_class = getattr(module, scenario_name.capitalize(), None)
                if scenario_class and issubclass(scenario_class, ScenarioBase):
                    self.scenarios[self.command_name(scenario_name)] = scenario_class()
                else:
                    logger.warning(f"Skipping {scenario_name}: no {scenario_name.capitalize()} scenario class")

    @staticmethod
    def command_name(scenario_name):
        return scenario_name.replace("_", "-")

    def register_commands(self, subparsers):
        for command, scenario in self.scenarios.items():
            parser = subparsers.add_parser(command, help=scenario.help)
            scenario.add_arguments(parser)
            parser.set_defaults(scenario=command)

    def get(self, command):
        return self.scenarios[command]
