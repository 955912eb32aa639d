#!/usr/bin/env python3
"""Results API against an in-memory database."""
import os

os.environ.setdefault('DATABASE_URL', 'sqlite://')

import pytest

from main import app


@pytest.fixture
def client():
    app.config['TESTING'] = True
    with app.test_client() as client:
        yield client


def test_ping(client):
    response = client.get('/api/ping')
    assert response.status_code == 200
    assert response.get_json()['status'] == 'ok'


def test_trig_kernel(client):
    response = client.get('/api/trig/sigma?args=0.1')
    assert response.status_code == 200
    data = response.get_json()
    assert data['value'] == pytest.approx(2.996566, abs=1e-6)
    assert data['args'] == [0.1]


def test_trig_errors(client):
    assert client.get('/api/trig/os_system?args=1').status_code == 404
    assert client.get('/api/trig/sigma?args=x').status_code == 400
    response = client.get('/api/trig/sigma?args=-1')
    assert response.status_code == 400
    assert response.get_json()['error'] == 'domain_error'
    assert client.get('/api/trig/pants_seam?args=1').status_code == 400


def test_cusp_model_run_is_stored(client):
    response = client.post('/api/runs', json={
        'command': 'cusp-model',
        'config': {'schema': 'collar-interaction/1', 'experiment': {'r_values': [0.1, 0.01]}},
    })
    assert response.status_code == 201
    run = response.get_json()
    assert run['status'] == 'ok'
    assert run['row_count'] == 3

    detail = client.get(f"/api/runs/{run['id']}").get_json()
    assert detail['rows'][0].startswith('r,max_winding,')
    assert detail['config_hash'] == run['config_hash']

    csv_response = client.get(f"/api/runs/{run['id']}/csv")
    assert csv_response.status_code == 200
    lines = csv_response.get_data(as_text=True).splitlines()
    assert len(lines) == 3
    assert lines[1].startswith('0.100000000000,20,')
    assert lines[1].endswith(run['config_hash'])

    listed = client.get('/api/runs?command=cusp-model').get_json()
    assert any(item['id'] == run['id'] for item in listed)


def test_failed_run_is_recorded(client):
    response = client.post('/api/runs', json={'command': 'systole', 'config': {}})
    assert response.status_code == 400
    run = response.get_json()
    assert run['status'] == 'error'
    assert run['error']['error'] == 'invalid_config'
    assert client.get(f"/api/runs/{run['id']}").get_json()['exit_status'] == 2


def test_bad_requests(client):
    assert client.post('/api/runs', json={}).status_code == 400
    response = client.post('/api/runs', json={'command': 'nope'})
    assert response.status_code == 400
    assert response.get_json()['error']['error'] == 'invalid_config'
    assert client.get('/api/runs/99999').status_code == 404
    assert client.get('/api/runs/99999/csv').status_code == 404


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
