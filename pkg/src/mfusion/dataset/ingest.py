"""
Adapter for preprocessed real-dataset artifacts.

Expected layout under the root: one folder per maneuver, and inside it
per-video artifact files whose names follow the patterns of the layout
descriptor. `{video}` stands for the video id. The defaults follow the
public in-cabin driving dataset's folder names:

    root/
      end_action/<video>/gaze.jsonl        (geometry gaze output)
      end_action/<video>/detections.jsonl  ({"frame": i, "boxes": [...]})
      end_action/<video>/lanes.json        (one object, or a list per frame)
      lchange/...

A box is [cx, cy, w, h, class_id] with raw detector classes 0..5; boxes are
normalized to the image unless the descriptor names an image size.
"""

import copy
import glob
import json
import logging
import os
import re

import numpy as np

from ..exceptions import DatasetError, DatasetIOError, EmptyDatasetError, \
    FusionError
from ..features import Detection, LaneInfo, SEQ_LEN, assemble_sequence
from ..geometry import read_gaze
from .manifest import DatasetManifest

log = logging.getLogger(__name__)

DEFAULT_LAYOUT = {
    'folders': {'end_action': 0, 'lchange': 1, 'lturn': 2,
                'rchange': 3, 'rturn': 4},
    'gaze': '{video}/gaze.jsonl',
    'detections': '{video}/detections.jsonl',
    'lanes': '{video}/lanes.json',
    # [width, height] when boxes are in pixels; null when normalized
    'image': None,
}


def load_layout(path=None):
    """Layout descriptor from a JSON file merged over DEFAULT_LAYOUT."""
    layout = copy.deepcopy(DEFAULT_LAYOUT)
    if path is None:
        return layout
    try:
        with open(path) as f:
            overrides = json.load(f)
    except (IOError, ValueError) as ex:
        raise DatasetError("cannot read layout descriptor %s: %s"
                           % (path, ex))
    if not isinstance(overrides, dict):
        raise DatasetError("layout descriptor must be a JSON object")
    layout.update(overrides)
    for label in layout['folders'].values():
        if label not in range(5):
            raise DatasetError("layout label %r not in 0..4" % (label,))
    return layout


def _video_ids(folder, pattern):
    head, _, tail = pattern.partition('{video}')
    regex = re.compile(re.escape(head) + r'(?P<video>[^/]+)' +
                       re.escape(tail))
    found = []
    for path in glob.glob(os.path.join(folder, head + '*' + tail)):
        rel = os.path.relpath(path, folder).replace(os.sep, '/')
        m = regex.fullmatch(rel)
        if m:
            found.append(m.group('video'))
    return sorted(found)


def _read_gaze(path):
    records = sorted(read_gaze(path), key=lambda r: r[0])
    return [g.as_array() if g.valid else np.zeros(4) for _, g in records]


def _read_detections(path, image):
    scale = np.ones(4) if not image else \
        np.array([image[0], image[1], image[0], image[1]], dtype=np.float64)
    frames = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                boxes = []
                for box in rec.get('boxes', []):
                    cx, cy, w, h = np.asarray(box[:4], dtype=np.float64) \
                        / scale
                    det = Detection.from_detector(cx, cy, w, h, box[4])
                    if det is not None:
                        boxes.append(det)
                frames[int(rec['frame'])] = boxes
            except (ValueError, KeyError, TypeError, IndexError) as ex:
                raise DatasetError("%s line %d: %s" % (path, lineno, ex))
    return [frames[i] for i in sorted(frames)]


def _lane(obj):
    try:
        return LaneInfo(int(obj['lane_position']), int(obj['num_lanes']),
                        int(obj.get('near_intersection', 0)))
    except (KeyError, TypeError, ValueError) as ex:
        raise DatasetError("bad lane record %r: %s" % (obj, ex))


def _read_lanes(path):
    with open(path) as f:
        try:
            obj = json.load(f)
        except ValueError as ex:
            raise DatasetError("%s: %s" % (path, ex))
    if isinstance(obj, dict):
        return [_lane(obj)] * SEQ_LEN
    return [_lane(o) for o in obj]


def ingest_video(folder, video, label, layout):
    """One LabeledSequence from a video's artifacts; raises on any defect."""
    def artifact(key):
        return os.path.join(folder, layout[key].format(video=video))

    gaze = _read_gaze(artifact('gaze'))
    objects = _read_detections(artifact('detections'), layout.get('image'))
    lanes = _read_lanes(artifact('lanes'))
    seq_id = "%s/%s" % (os.path.basename(folder), video)
    return assemble_sequence(gaze, objects, lanes, label, seq_id)


def ingest_real(root, layout=None):
    """Manifest of every video under root that passes validation.

    Videos that fail are logged and skipped.
    """
    layout = layout or load_layout()
    if not os.path.isdir(root) or not os.access(root, os.R_OK | os.X_OK):
        raise DatasetIOError("cannot read dataset root %s" % root)
    sequences = []
    skipped = 0
    for name, label in sorted(layout['folders'].items()):
        folder = os.path.join(root, name)
        if not os.path.isdir(folder):
            log.debug("no %s folder under %s", name, root)
            continue
        for video in _video_ids(folder, layout['gaze']):
            try:
                sequences.append(ingest_video(folder, video, label, layout))
            except (FusionError, IOError) as ex:
                log.warning("skipping %s/%s: %s", name, video, ex)
                skipped += 1
    if not sequences:
        raise EmptyDatasetError("no valid sequences under %s (%d skipped)"
                                % (root, skipped))
    log.info("ingested %d sequences from %s, skipped %d",
             len(sequences), root, skipped)
    return DatasetManifest(sequences, 'real-adapter',
                           {'root': os.path.abspath(root),
                            'skipped': skipped})
