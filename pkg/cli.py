#!/usr/bin/env python3
"""
Collar interaction command-line runner.
Builds the surface described by a JSON config, runs one command and writes
<out>/<command>.csv; errors go to <out>/error.json with exit status 2.
"""
import sys
import json
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import annulus
import geodesics
import hyptrig
import interaction
import intersect
from artifacts import write_csv, write_error_json, format_number
from config import (LOG_FILE, LOG_LEVEL, OUT_DIR, config_from_dict, load_config, apply_overrides,
                    config_hash)
from errors import CollarError, ConfigError, ConstructionError, IndeterminateError
from surface import build_surface, load_spec, surface_check, genus2_dumbbell
from words import parse_word

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    header: list
    rows: list
    summary: str
    status: int = 0
    extra: dict = field(default_factory=dict)


def setup_logging(level=LOG_LEVEL, log_file=LOG_FILE):
    handlers = [logging.StreamHandler(sys.stdout)]
    if log_file:
        handlers.insert(0, logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _group(config):
    if config.surface is None:
        raise ConfigError("this command needs a 'surface' in the config")
    surface = config.surface
    if isinstance(surface, str):
        try:
            with open(surface, encoding='utf-8') as f:
                surface = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read surface file {surface}: {e}", path=surface) from e
    return build_surface(load_spec(surface), config.experiment.properness_bound)


def _cutoff(config):
    if config.cutoff is None:
        raise ConfigError("this command needs a cutoff (config 'cutoff' or --cutoff)")
    return config.cutoff


def cmd_surface_check(config):
    group = _group(config)
    check = surface_check(group, properness_bound=config.experiment.properness_bound,
                          max_word_length=min(config.search.max_word_length, 6),
                          element_budget=config.search.element_budget)
    rows = [
        ('generators', ' '.join(f'{g.label}={g.source}' for g in group.generators)),
        ('relation_residual', check.relation_residual),
        ('pants_residual', check.pants_residual),
        ('holonomy_residual', check.holonomy_residual),
        ('max_length_error', check.max_length_error),
        ('near_identity', check.near_identity),
        ('ball_size', check.ball_size),
        ('properness_violations', ' '.join(check.properness_violations)),
    ]
    if not check.ok:
        raise ConstructionError("surface check failed", relation_residual=check.relation_residual,
                                max_length_error=check.max_length_error, near_identity=check.near_identity)
    return CommandResult(['metric', 'value'], rows, f"surface ok: residual {check.relation_residual:.3e}")


def cmd_enumerate(config):
    group = _group(config)
    cutoff = _cutoff(config)
    spectrum = geodesics.enumerate_spectrum(group, cutoff, config.search)
    rows = [(c.word, c.length, c.primitive, c.power) for c in spectrum.classes]
    summary = f"{len(rows)} classes up to {cutoff:g}"
    if not spectrum.complete:
        summary += f", INCOMPLETE (words capped at {config.search.max_word_length})"
    if config.oracle:
        _, _, stabilized = geodesics.certify_spectrum(group, cutoff, config.search)
        summary += ', stabilized' if stabilized else ', NOT stabilized'
    return CommandResult(['word', 'length', 'primitive', 'power'], rows, summary)


def cmd_systole(config):
    group = _group(config)
    cls, length = geodesics.systole(group, config.search)
    return CommandResult(['word', 'length'], [(cls.word, length)], f'{length:.12f}')


def _pair_classes(group, config):
    labels = group.labels
    return [geodesics.class_from_word(group, parse_word(str(text), labels)) for text in config.pair]


def cmd_intersect(config):
    group = _group(config)
    settings = config.search
    header = ['first', 'second', 'count', 'stabilized', 'oracle', 'agree']
    if config.pair:
        if len(config.pair) != 2:
            raise ConfigError("pair must name exactly two words", pair=list(config.pair))
        first, second = _pair_classes(group, config)
        result = intersect.intersection_number(group, first, second, settings)
        oracle = intersect.intersection_oracle(group, first, second, settings).count if config.oracle else None
        agree = None if oracle is None else oracle == result.count
        rows = [(first.word, second.word, result.count, result.stabilized, oracle, agree)]
        return CommandResult(header, rows, f"i({first.word}, {second.word}) = {result.count}")

    classes = geodesics.enumerate_geodesics(group, _cutoff(config), settings)
    matrix, stabilized = intersect.intersection_matrix(group, classes, settings)
    rows, disagreements = [], 0
    for i, a in enumerate(classes):
        for j in range(i, len(classes)):
            b = classes[j]
            oracle = agree = None
            if config.oracle and max(a.length, b.length) <= settings.oracle_cutoff:
                oracle = intersect.intersection_oracle(group, a, b, settings).count
                agree = oracle == int(matrix[i, j])
                disagreements += not agree
            rows.append((a.word, b.word, int(matrix[i, j]), stabilized, oracle, agree))
    summary = f"{len(classes)} classes, {len(rows)} pairs"
    if config.oracle:
        summary += f", {disagreements} oracle disagreements"
    return CommandResult(header, rows, summary, status=2 if disagreements else 0)


def cmd_interaction(config):
    group = _group(config)
    cutoff, capped = config.cutoff, False
    if cutoff is None:
        _, sys_length = geodesics.systole(group, config.search)
        s = hyptrig.capped_systole(sys_length)
        cutoff = interaction.cutoff_rule(s, config.experiment)
        capped = cutoff < interaction.cutoff_rule(s, config.experiment, capped=False)
    report = interaction.estimate_interaction(group, cutoff, config.search)
    first, second = (c.word for c in report.best_pair) if report.best_pair else ('', '')
    header = ['cutoff', 'sys', 'best_first', 'best_second', 'best_count', 'i_hat', 'i_hat_delta',
              'i_hat_simple', 'figure_eight_floor', 'predicted', 'certificate', 'ratio', 'unstabilized_pairs',
              'indeterminate_pairs', 'spectrum_complete', 'capped']
    rows = [(cutoff, report.systole, first, second, report.best_count, report.i_hat, report.i_hat_delta,
             report.i_hat_simple, report.figure_eight_floor, report.predicted, report.certificate, report.ratio,
             report.unstabilized_pairs, len(report.indeterminate_pairs), report.spectrum_complete, capped)]
    summary = f"i_hat {format_number(report.i_hat)}, ratio {format_number(report.ratio)}"
    if capped or not report.spectrum_complete or report.indeterminate_pairs:
        summary += " (ratio not checked: capped cutoff, incomplete spectrum or indeterminate pairs)"
    return CommandResult(header, rows, summary)


def cmd_companion(config):
    group = _group(config)
    sys_class, sys_length = geodesics.systole(group, config.search)
    companion, count = interaction.find_systole_companion(group, config.search, config.experiment)
    slack = config.experiment.companion_slack
    header = ['systole_word', 'sys', 'companion', 'length', 'intersections', 'window', 'single_window']
    rows = [(sys_class.word, sys_length, companion.word, companion.length, count,
             hyptrig.companion_window(sys_length, slack, 2), hyptrig.companion_window(sys_length, slack, 1))]
    return CommandResult(header, rows, f"companion {companion.word}: length {companion.length:.6f}, i = {count}")


def cmd_asymptotic(config):
    experiment = config.experiment
    family = [(eps, genus2_dumbbell(eps, *experiment.loop_lengths)) for eps in experiment.epsilons]
    table = interaction.asymptotic_experiment(family, config.search, experiment)
    header = ['epsilon', 'sys', 'rule_cutoff', 'cutoff', 'capped', 'i_hat', 'i_hat_delta', 'i_hat_simple',
              'predicted', 'certificate', 'ratio', 'ratio_checked', 'unstabilized_pairs', 'indeterminate_pairs',
              'spectrum_complete', 'companion', 'error']
    rows = [(r.epsilon, r.systole, r.rule_cutoff, r.cutoff, r.capped, r.i_hat, r.i_hat_delta, r.i_hat_simple,
             r.predicted, r.certificate, r.ratio, r.ratio_checked, r.unstabilized_pairs, r.indeterminate_pairs,
             r.spectrum_complete, r.companion, r.error) for r in table]
    failed = sum(1 for r in table if r.error)
    unchecked = sum(1 for r in table if not r.error and not r.ratio_checked)
    return CommandResult(header, rows, f"{len(rows)} surfaces, {failed} failed, {unchecked} ratios not checked")


def _self_intersection(group, cls, settings):
    try:
        return intersect.self_intersection(group, cls, settings)
    except IndeterminateError as e:
        logger.warning(f"simplicity of {cls.word} unknown: {e}")
        return None


def cmd_collar_audit(config):
    group = _group(config)
    settings = config.search
    cuff = config.cuff or min(group.decomposition.gluings, key=lambda g: (g.length, g.name)).name
    classes = [c for c in geodesics.enumerate_geodesics(group, _cutoff(config), settings) if c.primitive]
    with ThreadPoolExecutor(max_workers=settings.workers) as executor:
        selfs = list(executor.map(lambda c: _self_intersection(group, c, settings), classes))
    simple = {c.word: r.count == 0 for c, r in zip(classes, selfs) if r is not None and r.stabilized}
    audit = annulus.collar_audit(group, classes, cuff, simple, settings, config.experiment)
    rows = []
    for cls in classes:
        for arc in audit.arcs[cls.word]:
            rows.append((cls.word, arc.kind.value, arc.winding, arc.length, arc.depth, arc.flagged))
    findings = [(f.check, f.first, f.second, f.value, f.bound, f.detail) for f in audit.findings]
    extra = {
        'collar-audit-findings': (['check', 'first', 'second', 'value', 'bound', 'detail'], findings),
        'collar-audit-pairs': (['first', 'second', 'thin_count', 'first_thin_length', 'second_thin_length',
                                'ratio'], audit.pair_rows),
    }
    return CommandResult(['word', 'kind', 'winding', 'length', 'depth', 'flagged'], rows,
                         f"collar of {cuff}: {len(rows)} arcs, {audit.violations} findings", extra=extra)


def cmd_cusp_model(config):
    experiment = config.experiment
    table = annulus.cusp_model_experiment(experiment.r_values, experiment.horocycle_norm)
    header = ['r', 'max_winding', 'best_n', 'best_m', 'value', 'predicted', 'ratio', 'self_bound', 'at_max']
    rows = [(r.r, r.max_winding, r.best_n, r.best_m, r.value, r.predicted, r.ratio, r.self_bound, r.at_max)
            for r in table]
    return CommandResult(header, rows, ' '.join(f"r={format_number(r.r)}:{r.ratio:.4f}" for r in table))


def cmd_trig_selftest(config):
    checks = hyptrig.selftest()
    rows = [(c.name, c.passed, c.worst, c.detail) for c in checks]
    failed = [c.name for c in checks if not c.passed]
    summary = f"{len(checks) - len(failed)}/{len(checks)} properties pass"
    if failed:
        summary += f"; failed: {', '.join(failed)}"
    return CommandResult(['property', 'passed', 'worst', 'detail'], rows, summary, status=2 if failed else 0)


COMMANDS = {
    'surface-check': cmd_surface_check,
    'enumerate': cmd_enumerate,
    'systole': cmd_systole,
    'intersect': cmd_intersect,
    'interaction': cmd_interaction,
    'companion': cmd_companion,
    'asymptotic': cmd_asymptotic,
    'collar-audit': cmd_collar_audit,
    'cusp-model': cmd_cusp_model,
    'trig-selftest': cmd_trig_selftest,
}


def run_command(command, config):
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}", command=command, known=sorted(COMMANDS))
    logger.info(f"Running {command} (config {config_hash(config)})")
    return COMMANDS[command](config)


def write_outputs(command, config, result):
    digest = config_hash(config)
    out = Path(config.out_dir)
    paths = [write_csv(out / f'{command}.csv', result.header, result.rows, digest)]
    for name, (header, rows) in sorted(result.extra.items()):
        paths.append(write_csv(out / f'{name}.csv', header, rows, digest))
    return paths


def build_parser():
    parser = argparse.ArgumentParser(prog='collar', description="Closed geodesics, intersections and "
                                                               "interaction strength of hyperbolic surfaces.")
    parser.add_argument('command', choices=sorted(COMMANDS))
    parser.add_argument('--config', help="JSON run configuration")
    parser.add_argument('--cutoff', type=float, help="length cutoff")
    parser.add_argument('--workers', type=int, help="worker threads")
    parser.add_argument('--out', help="output directory")
    parser.add_argument('--tolerance', type=float, help="tolerance for identifying lifts of one geodesic")
    parser.add_argument('--oracle', action='store_true', help="cross-check with the brute-force oracle")
    parser.add_argument('--log-level', default=LOG_LEVEL)
    parser.add_argument('--log-file', default=LOG_FILE)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_file)
    config = None
    try:
        config = load_config(args.config) if args.config else config_from_dict({})
        config = apply_overrides(config, cutoff=args.cutoff, workers=args.workers, out_dir=args.out,
                                 tolerance=args.tolerance, oracle=args.oracle or None)
        result = run_command(args.command, config)
        write_outputs(args.command, config, result)
    except CollarError as e:
        out = Path(args.out or (config.out_dir if config else OUT_DIR))
        write_error_json(out / 'error.json', e, config_hash(config) if config else None)
        logger.error(f"{args.command} failed: {e.code}: {e.message}")
        print(json.dumps(e.to_dict(), sort_keys=True), file=sys.stderr)
        return 2
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}: {e}")
        return 1
    print(result.summary)
    return result.status


if __name__ == '__main__':
    sys.exit(main())
