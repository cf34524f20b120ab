"""
Runs one experiment and assembles its report.

``run`` returns a ``RunResult``: the JSON document, the process exit code
(0 when every check passed, 1 otherwise) and a tablib dataset for CSV output.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
import tablib
from django.utils import timezone

from dynamics.instances import random_instance
from dynamics.process import process_output, theta_apply, theta_from_basis
from dynamics.serializers import InstanceSerializer, ProcessMapSerializer
from probability.generators import make_rng
from probability.information import convert
from sampler.exceptions import ReconstructionError
from sampler.reconstruction import cells_within_error_bars, reconstruct_theta
from sampler.serializers import EmpiricalProcessSerializer, histogram_dataset
from sampler.simulation import RunConfig, estimate_process
from second_law.bounds import SecondLawReport, second_law_check
from second_law.fixed_points import fixed_point
from second_law.lifting import lift_theta
from second_law.serializers import LiftedMapSerializer, SecondLawReportSerializer

from .config import SCHEMA_VERSION
from .demos import DEMOS
from .suites import SUITES

logger = logging.getLogger(__name__)

CONVERGENCE_FRACTION = 0.99


@dataclass
class RunResult:
    document: dict
    exit_code: int = 0
    dataset: Optional[tablib.Dataset] = None


def _header(cfg):
    return {
        'schema_version': SCHEMA_VERSION,
        'mode': cfg.mode,
        'generated_at': timezone.now().isoformat(),
        'config': cfg.as_dict(),
    }


def _plain(value, units):
    """Turn reports and numpy values inside a demo document into JSON-ready data."""
    if isinstance(value, SecondLawReport):
        return dict(SecondLawReportSerializer(value, context={'units': units}).data)
    if isinstance(value, dict):
        return {k: _plain(v, units) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v, units) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _row(value):
    if isinstance(value, float):
        return format(value, '.17g')
    return value


def _instance_for(cfg):
    if cfg.instance is not None:
        return cfg.instance
    return random_instance(cfg.seed, cfg.d_s, cfg.d_e)


def run_demo(cfg):
    sections = {name: demo() for name, demo in DEMOS.items()}
    failed = [f'{name}.{check}' for name, section in sections.items()
              for check, ok in section['checks'].items() if not ok]
    document = _header(cfg)
    document['demos'] = _plain(sections, cfg.units)
    document['failed'] = failed
    document['passed'] = not failed

    data = tablib.Dataset(headers=['demo', 'quantity', 'value'])
    for name, section in document['demos'].items():
        for key, value in section.items():
            if key == 'checks':
                continue
            if isinstance(value, dict):
                for field in ('lhs', 'rhs', 'slack', 'satisfied'):
                    data.append([name, f'{key}.{field}', _row(value[field])])
            else:
                data.append([name, key, _row(value) if not isinstance(value, list) else repr(value)])
    return RunResult(document, 1 if failed else 0, data)


def _run_suite(index, suite, cfg):
    def trial(t):
        return suite.run(cfg, make_rng(cfg.seed, index, t), t)

    count = suite.trial_count(cfg)
    if cfg.workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(trial, range(count)))
    else:
        outcomes = [trial(t) for t in range(count)]

    values = [float(v) for _, v in outcomes]
    worst = min(values) if suite.worst == 'min' else max(values)
    if suite.entropic:
        worst = convert(worst, cfg.units)
    passed = sum(1 for ok, _ in outcomes if ok)
    logger.info(f"[CHECK] {suite.name}: {passed}/{count} passed, worst {worst!r}")
    return {
        'name': suite.name,
        'trials': count,
        'passed': passed,
        'failed': count - passed,
        'worst': worst,
        'ok': passed == count,
    }


def run_check(cfg):
    results = [_run_suite(index, suite, cfg) for index, suite in enumerate(SUITES)]
    document = _header(cfg)
    document['suites'] = results
    document['passed'] = all(r['ok'] for r in results)

    data = tablib.Dataset(headers=['suite', 'trials', 'passed', 'failed', 'worst', 'ok'])
    for r in results:
        data.append([r['name'], r['trials'], r['passed'], r['failed'], _row(r['worst']), r['ok']])
    return RunResult(document, 0 if document['passed'] else 1, data)


def run_secondlaw(cfg):
    instance = _instance_for(cfg)
    theta = theta_from_basis(instance.channel, instance.joint)
    lifted = lift_theta(theta)
    fp = fixed_point(lifted)
    report = second_law_check(theta, instance.preparation, lifted, fp)

    document = _header(cfg)
    document['instance'] = InstanceSerializer(instance).data
    document['process'] = ProcessMapSerializer(theta).data
    document['lifted_map'] = LiftedMapSerializer(lifted).data
    document['second_law'] = SecondLawReportSerializer(report, context={'units': cfg.units}).data
    document['passed'] = report.satisfied

    row = document['second_law']
    data = tablib.Dataset(headers=['lhs', 'rhs', 'slack', 'satisfied', 'degenerate', 'residual', 'unique'])
    data.append([_row(row[k]) for k in data.headers])
    return RunResult(document, 0 if report.satisfied else 1, data)


def run_tomography(cfg):
    instance = _instance_for(cfg)
    exact = theta_from_basis(instance.channel, instance.joint)
    run = RunConfig(cfg.samples, cfg.seed, instance.d_s, instance.d_e)
    empirical = estimate_process(instance.channel, instance.joint, run, workers=cfg.workers)

    document = _header(cfg)
    document['instance'] = InstanceSerializer(instance).data
    document['empirical'] = EmpiricalProcessSerializer(empirical).data
    try:
        estimate = reconstruct_theta(empirical)
    except ReconstructionError as exc:
        logger.error(f"[SAMPLER] {exc}")
        document['error'] = {'message': str(exc), 'cell': list(exc.cell)}
        document['passed'] = False
        return RunResult(document, 1, histogram_dataset(empirical))

    predicted = theta_apply(estimate, instance.preparation)
    actual = process_output(instance.channel, instance.joint, instance.preparation)
    fraction = cells_within_error_bars(empirical, exact)
    document['estimate'] = ProcessMapSerializer(estimate).data
    document['reconstruction'] = {
        'max_basis_output_error': float(np.max(np.abs(estimate.basis_outputs - exact.basis_outputs))),
        'marginal_error': float(np.max(np.abs(estimate.marginal.entries - exact.marginal.entries))),
        'prediction': predicted.tolist(),
        'exact_output': actual.tolist(),
        'prediction_l1_error': float(np.abs(predicted.entries - actual.entries).sum()),
        'cells_within_5_sigma': fraction,
    }
    document['second_law'] = SecondLawReportSerializer(
        second_law_check(estimate, instance.preparation), context={'units': cfg.units}
    ).data
    document['passed'] = fraction >= CONVERGENCE_FRACTION
    return RunResult(document, 0 if document['passed'] else 1, histogram_dataset(empirical))


def run_random_instance(cfg):
    instance = random_instance(cfg.seed, cfg.d_s, cfg.d_e)
    document = _header(cfg)
    document['instance'] = InstanceSerializer(instance).data
    return RunResult(document)


MODES = {
    'demo': run_demo,
    'check': run_check,
    'secondlaw': run_secondlaw,
    'tomography': run_tomography,
    'random-instance': run_random_instance,
}


def run(cfg):
    logger.info(f"[CLI] mode {cfg.mode}, seed {cfg.seed}, dims {cfg.d_s}x{cfg.d_e}")
    return MODES[cfg.mode](cfg)
