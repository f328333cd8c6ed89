import remsleep.bandit as bandit
import remsleep.config as config
import remsleep.experiment as experiment
import remsleep.geometry as geometry
import remsleep.localization as localization
import remsleep.netsim as netsim
import remsleep.power as power
import remsleep.rem as rem
import remsleep.tracker as tracker
from remsleep.experiment import ExperimentConfig, run_full_experiment
from remsleep.tracker import current_tracker


__version__ = "0.1"
