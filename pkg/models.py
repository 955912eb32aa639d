import json
from datetime import datetime
from app import db


class RunRecord(db.Model):
    __tablename__ = 'runs'

    id = db.Column(db.Integer, primary_key=True)
    command = db.Column(db.String(40), nullable=False)
    config_hash = db.Column(db.String(16))
    status = db.Column(db.String(20), default='running')  # running, ok, failed, error
    exit_status = db.Column(db.Integer)
    config_json = db.Column(db.Text)
    summary = db.Column(db.Text)
    error_json = db.Column(db.Text)
    started_at = db.Column(db.DateTime, default=datetime.utcnow)
    finished_at = db.Column(db.DateTime)

    rows = db.relationship('ArtifactRow', backref='run', cascade='all, delete-orphan',
                           order_by='ArtifactRow.id')

    @property
    def error(self):
        return json.loads(self.error_json) if self.error_json else None

    def to_dict(self, with_rows=False):
        data = {
            'id': self.id,
            'command': self.command,
            'config_hash': self.config_hash,
            'status': self.status,
            'exit_status': self.exit_status,
            'summary': self.summary,
            'error': self.error,
            'started_at': self.started_at.isoformat() if self.started_at else None,
            'finished_at': self.finished_at.isoformat() if self.finished_at else None,
            'row_count': len(self.rows),
        }
        if with_rows:
            data['rows'] = [row.line for row in self.rows]
        return data

    def __repr__(self):
        return f'<RunRecord {self.id} {self.command} {self.status}>'


class ArtifactRow(db.Model):
    __tablename__ = 'artifact_rows'

    id = db.Column(db.Integer, primary_key=True)
    run_id = db.Column(db.Integer, db.ForeignKey('runs.id'), nullable=False)
    table_name = db.Column(db.String(60), nullable=False)  # command name or an extra table of the run
    row_index = db.Column(db.Integer, nullable=False)  # 0 is the header line
    line = db.Column(db.Text, nullable=False)

    def to_dict(self):
        return {'table': self.table_name, 'row_index': self.row_index, 'line': self.line}

    def __repr__(self):
        return f'<ArtifactRow {self.run_id}:{self.table_name}:{self.row_index}>'
