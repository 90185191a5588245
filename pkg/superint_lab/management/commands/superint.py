import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from superint_lab.exceptions import (
    ChartMismatchError,
    ConfigError,
    DomainError,
    SamplingExhausted,
    SingularChartError,
    SingularityError,
)
from superint_lab.experiments import run_experiment
from superint_lab.forms import EXPERIMENTS, parse_config
from superint_lab.utils import get_output_dir

EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.INFO, 3: logging.DEBUG}


def load_config_file(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise ConfigError("Cannot read config %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise ConfigError("Config %s is not valid JSON: %s" % (path, e))


class Command(BaseCommand):
    help = "Runs a superintegrability experiment and writes its report."

    def add_arguments(self, parser):
        parser.add_argument("experiment", choices=EXPERIMENTS)
        parser.add_argument("--config", dest="config", help="JSON experiment config.")
        parser.add_argument("--out", dest="out", help="Output directory for the report and CSV files.")
        parser.add_argument("--seed", dest="seed", type=int, help="Overrides sampling.seed.")
        parser.add_argument("--n", dest="n", type=int, help="Overrides options.n (coeffs).")

    def handle(self, *args, **options):
        logging.getLogger("superint_lab").setLevel(VERBOSITY_LEVELS.get(options["verbosity"], logging.DEBUG))
        try:
            config = parse_config(
                load_config_file(options["config"]),
                experiment=options["experiment"],
                seed=options["seed"],
                n=options["n"],
            )
            out_dir = Path(get_output_dir(options["out"], config.output["path"]))
            report = run_experiment(config, out_dir)
        except ConfigError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG)
        except (SingularityError, SingularChartError, SamplingExhausted) as e:
            raise CommandError(str(e), returncode=EXIT_RUNTIME)
        except (DomainError, ChartMismatchError) as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG)

        if config.experiment == "coeffs":
            for name in report.artifacts:
                self.stdout.write((out_dir / name).read_text(encoding="utf-8"), ending="")
        for check in report.checks:
            status = "ok" if check.passed else ("info" if check.informational else "FAIL")
            self.stdout.write("%-28s %-5s %s" % (check.name, status, check.value))
        self.stdout.write("digest %s" % report.digest())
        if not report.passed:
            raise CommandError(
                "%s failed: %s" % (config.experiment, ", ".join(c.name for c in report.failed_checks)),
                returncode=EXIT_FAILED,
            )
