from .encode import (Detection, LaneInfo, FrameFeatures, encode_objects,
                     encode_lanes, slot_areas, MANEUVERS, FRAME_WIDTH,
                     GAZE, OBJECTS, LANES, EMPTY_SLOT)
from .sequence import (LabeledSequence, assemble_sequence, truncate_and_pad,
                       stack_frames, read_sequences, write_sequences,
                       seconds_before, SEQ_LEN, KEEP_FRAMES)

__all__ = [
    'Detection', 'LaneInfo', 'FrameFeatures', 'encode_objects',
    'encode_lanes', 'slot_areas', 'MANEUVERS', 'FRAME_WIDTH', 'GAZE',
    'OBJECTS', 'LANES', 'EMPTY_SLOT', 'LabeledSequence', 'assemble_sequence',
    'truncate_and_pad', 'stack_frames', 'read_sequences', 'write_sequences',
    'seconds_before', 'SEQ_LEN', 'KEEP_FRAMES',
]
