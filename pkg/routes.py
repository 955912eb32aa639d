import json
from datetime import datetime
from flask import Blueprint, request, jsonify, Response
from app import app, db
from models import RunRecord, ArtifactRow

import hyptrig
from artifacts import csv_lines, format_number
from cli import run_command
from config import config_from_dict, config_hash
from errors import CollarError

# API Blueprint for results
api = Blueprint('api', __name__, url_prefix='/api')

TRIG_KERNELS = {
    'sigma': hyptrig.sigma,
    'thin_radius': hyptrig.thin_radius,
    'pants_seam': hyptrig.pants_seam,
    'hexagon_opposite': hyptrig.hexagon_opposite,
    'figure_eight_length': hyptrig.figure_eight_length,
    'quad_two_right_angles': hyptrig.quad_two_right_angles,
    'quad_opposite_sides': hyptrig.quad_opposite_sides,
    'quad_same_side': hyptrig.quad_same_side,
    'trirectangle_distance': hyptrig.trirectangle_distance,
    'pentagon_side': hyptrig.pentagon_side,
    'type1_length_lower': hyptrig.type1_length_lower,
    'type2_length_lower': hyptrig.type2_length_lower,
    'predicted_interaction': hyptrig.predicted_interaction,
    'predicted_interaction_cusped': hyptrig.predicted_interaction_cusped,
    'intersection_certificate': hyptrig.intersection_certificate,
    'thin_ratio_bound': hyptrig.thin_ratio_bound,
}


def _store_table(run, table, header, rows, digest):
    for index, line in enumerate(csv_lines(header, rows, digest)):
        db.session.add(ArtifactRow(run_id=run.id, table_name=table, row_index=index, line=line))


@api.route('/ping')
def ping():
    """Simple ping endpoint for health checks"""
    return jsonify({'status': 'ok', 'message': 'pong'})


@api.route('/runs', methods=['POST'])
def create_run():
    data = request.get_json(silent=True)
    if not data or 'command' not in data:
        return jsonify({'error': 'invalid_request', 'message': "body must name a 'command'"}), 400

    command = data['command']
    run = RunRecord(command=command, config_json=json.dumps(data.get('config') or {}, sort_keys=True))
    db.session.add(run)
    db.session.commit()

    try:
        config = config_from_dict(data.get('config') or {})
        run.config_hash = config_hash(config)
        result = run_command(command, config)
    except CollarError as e:
        run.status = 'error'
        run.exit_status = 2
        run.error_json = json.dumps(e.to_dict(), sort_keys=True)
        run.finished_at = datetime.utcnow()
        db.session.commit()
        app.logger.warning(f"Run {run.id} ({command}) failed: {e.code}: {e.message}")
        return jsonify(run.to_dict()), 400

    _store_table(run, command, result.header, result.rows, run.config_hash)
    for name, (header, rows) in sorted(result.extra.items()):
        _store_table(run, name, header, rows, run.config_hash)
    run.status = 'ok' if result.status == 0 else 'failed'
    run.exit_status = result.status
    run.summary = result.summary
    run.finished_at = datetime.utcnow()
    db.session.commit()
    app.logger.info(f"Run {run.id} ({command}) finished: {result.summary}")
    return jsonify(run.to_dict()), 201


@api.route('/runs')
def list_runs():
    query = RunRecord.query
    command = request.args.get('command')
    if command:
        query = query.filter_by(command=command)
    runs = query.order_by(RunRecord.id.desc()).all()
    return jsonify([run.to_dict() for run in runs])


@api.route('/runs/<int:run_id>')
def get_run(run_id):
    run = db.session.get(RunRecord, run_id)
    if not run:
        return jsonify({'error': 'not_found', 'message': f'run {run_id} not found'}), 404
    return jsonify(run.to_dict(with_rows=True))


@api.route('/runs/<int:run_id>/csv')
def get_run_csv(run_id):
    run = db.session.get(RunRecord, run_id)
    if not run:
        return jsonify({'error': 'not_found', 'message': f'run {run_id} not found'}), 404
    table = request.args.get('table', run.command)
    lines = [row.line for row in run.rows if row.table_name == table]
    if not lines:
        return jsonify({'error': 'not_found', 'message': f'run {run_id} has no table {table!r}'}), 404
    return Response('\n'.join(lines) + '\n', mimetype='text/csv',
                    headers={'Content-Disposition': f'attachment; filename={table}-{run_id}.csv'})


@api.route('/trig/<name>')
def evaluate_trig(name):
    kernel = TRIG_KERNELS.get(name)
    if kernel is None:
        return jsonify({'error': 'not_found', 'message': f'unknown kernel {name!r}',
                        'known': sorted(TRIG_KERNELS)}), 404
    try:
        args = [float(x) for x in request.args.get('args', '').split(',') if x.strip()]
    except ValueError:
        return jsonify({'error': 'invalid_request', 'message': 'args must be comma-separated numbers'}), 400
    try:
        value = kernel(*args)
    except CollarError as e:
        return jsonify(e.to_dict()), 400
    except TypeError as e:
        return jsonify({'error': 'invalid_request', 'message': str(e)}), 400
    return jsonify({'name': name, 'args': args, 'value': value, 'formatted': format_number(value)})
