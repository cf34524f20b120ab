import json
import logging

from django.core.management.base import BaseCommand, CommandError

from experiments.config import MODES
from experiments.models import ExperimentRun
from experiments.renderers import ReportRenderer, render
from experiments.runner import run
from experiments.serializers import ExperimentConfigSerializer, first_error

logger = logging.getLogger(__name__)

# flag destination -> config field
FLAG_FIELDS = ('seed', 'trials', 'samples', 'tolerance', 'units', 'output', 'workers')


class Command(BaseCommand):
    help = (
        'Run worked examples, property suites, second-law checks or tomography '
        'experiments for stochastic dynamics with system-environment correlations.'
    )

    def add_arguments(self, parser):
        parser.add_argument('mode', nargs='?', help=f"One of: {', '.join(MODES)}")
        parser.add_argument('--config', dest='config_file', help='JSON config file; flags override its values')
        parser.add_argument('--dim-system', type=int, help='System dimension d_S')
        parser.add_argument('--dim-env', type=int, help='Environment dimension d_E')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--trials', type=int, help='Trials per property suite')
        parser.add_argument('--samples', type=int, help='Monte Carlo runs per basis preparation')
        parser.add_argument('--tolerance', type=float)
        parser.add_argument('--units', help='nats or bits')
        parser.add_argument('--output', help='json or csv')
        parser.add_argument('--workers', type=int, help='Threads for trial loops and sampler cells')
        parser.add_argument('--record', action='store_true', help='Store the run as an ExperimentRun')

    def _load(self, options):
        data = {}
        if options['config_file']:
            try:
                with open(options['config_file'], encoding='utf-8') as fh:
                    data = json.load(fh)
            except (OSError, ValueError) as exc:
                raise CommandError(f"config: cannot read {options['config_file']}: {exc}", returncode=2)
            if not isinstance(data, dict):
                raise CommandError('config: top level must be a JSON object', returncode=2)
        if options['mode']:
            data['mode'] = options['mode']
        for name in FLAG_FIELDS:
            if options[name] is not None:
                data[name] = options[name]
        if options['dim_system'] is not None or options['dim_env'] is not None:
            dims = list(data.get('dims') or [2, 2])
            if options['dim_system'] is not None:
                dims[0] = options['dim_system']
            if options['dim_env'] is not None:
                dims[1] = options['dim_env']
            data['dims'] = dims
        return data

    def handle(self, *args, **options):
        serializer = ExperimentConfigSerializer(data=self._load(options))
        if not serializer.is_valid():
            field, message = first_error(serializer.errors)
            logger.error(f"[CLI] invalid config field {field}: {message}")
            raise CommandError(f"{field}: {message}", returncode=2)
        cfg = serializer.save()

        result = run(cfg)
        self.stdout.write(render(result, cfg.output), ending='')

        if options['record']:
            entry = ExperimentRun.objects.create(
                mode=cfg.mode,
                seed=str(cfg.seed),
                config=cfg.as_dict(),
                report=json.loads(ReportRenderer().render(result.document)),
                exit_code=result.exit_code,
            )
            logger.info(f"[CLI] recorded run {entry.pk}")

        if result.exit_code:
            raise CommandError(f"{cfg.mode}: one or more checks failed", returncode=result.exit_code)
