# global_vars.py

from app.scenarios.scenario_manager import ScenarioManager

# Declare and instantiate the required global vars
# This prevents scanning the scenario directory more than once.
scenario_manager = ScenarioManager()
