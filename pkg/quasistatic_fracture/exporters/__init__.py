"""
Artifact writers: VTK meshes and fields, JSON dumps and summaries, CSV tables.
"""

from .vtk_writer import write_field_vtk, write_mesh_vtk
from .json_writer import (
    crack_payload,
    dump_json,
    field_payload,
    mesh_payload,
    read_json,
    write_crack_json,
    write_field_json,
    write_mesh_json,
    write_summary,
)
from .tables import read_ledger, read_table, write_ledger, write_table

__all__ = [
    'write_field_vtk',
    'write_mesh_vtk',
    'crack_payload',
    'dump_json',
    'field_payload',
    'mesh_payload',
    'read_json',
    'write_crack_json',
    'write_field_json',
    'write_mesh_json',
    'write_summary',
    'read_ledger',
    'read_table',
    'write_ledger',
    'write_table',
]
