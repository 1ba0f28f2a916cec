"""Orientation-consistency pretext samples and their ablation variants"""
from enum import IntEnum


class OrientationOffset(IntEnum):
    """Clockwise turn from the view orientation to the echo orientation, in quarter turns"""
    Same = 0
    Right = 1
    Opposite = 2
    Left = 3

    @classmethod
    def between(cls, view, echo):
        return cls(((echo - view) % 360) // 90)

    def apply(self, view):
        return (view + 90 * int(self)) % 360


# labels of the reduced two-way variant: Same -> 0, Opposite -> 1
C_SimpleOffsets = (OrientationOffset.Same, OrientationOffset.Opposite)


def make_pretext_sample(group, view, offset=None, rng=None):
    """(rgb at `view`, normalized spectrogram at view + offset, offset label)

    `offset` is drawn uniformly over the four quarter turns when omitted.
    """
    if offset is None:
        offset = OrientationOffset(int(rng.integers(4)))
    offset = OrientationOffset(offset)
    return group.rgb(view), group.spec(offset.apply(view)), int(offset)


def make_simple_sample(group, view, same):
    """Two-way variant: echo from the same orientation (label 0) or the opposite one (label 1)"""
    offset = C_SimpleOffsets[0 if same else 1]
    rgb, spec, _ = make_pretext_sample(group, view, offset)
    return rgb, spec, 0 if same else 1


def make_match_sample(group, other, view, echo_orientation):
    """Binary matching: echo of another pose of the same scene (label 0) or of a different scene (label 1)"""
    same = other.record.scene_id == group.record.scene_id
    return group.rgb(view), other.spec(echo_orientation), 0 if same else 1
