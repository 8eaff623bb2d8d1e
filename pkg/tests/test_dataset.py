"""Manifest I/O, splits, and dataset statistics."""

import math

import pytest

from dockpilot.dataset import (Sample, base_id, dataset_stats, manifest_counts,
                               read_manifest, split, split_by_base, validate_manifest,
                               write_manifest)
from dockpilot.se2 import Pose2


def mk(i, scene="sc00", augmented=False, sid=None, dist=3.0, speed=0.2):
    sid = sid or f"{scene}-{i:04d}"
    return Sample(id=sid, image=f"images/{sid}.pgm", label=Pose2(1.0 + i, 0.5, 0.1),
                  world_pose=Pose2(0, 0, 0), speed=speed, dist=dist, t=0.5 * i,
                  scene=scene, augmented=augmented)


class TestManifestIo:
    def test_roundtrip(self, tmp_path):
        samples = [mk(i) for i in range(5)]
        path = tmp_path / "manifest.jsonl"
        write_manifest(path, samples)
        back = read_manifest(path)
        assert back == samples

    def test_roundtrip_preserves_floats_exactly(self, tmp_path):
        s = mk(0)
        s = Sample(**{**s.__dict__, "label": Pose2(1.2345678901234567, -0.1, 0.3)})
        path = tmp_path / "m.jsonl"
        write_manifest(path, [s])
        assert read_manifest(path)[0].label.x == s.label.x

    def test_validate_missing_image(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            validate_manifest([mk(0)], tmp_path)

    def test_validate_duplicate_id(self, tmp_path):
        (tmp_path / "images").mkdir()
        (tmp_path / "images" / "sc00-0000.pgm").write_bytes(b"P5\n1 1\n255\n\x00")
        with pytest.raises(ValueError):
            validate_manifest([mk(0), mk(0)], tmp_path)

    def test_counts(self):
        samples = [mk(0), mk(1), mk(2, augmented=True)]
        counts = manifest_counts(samples)
        assert counts["total"] == 3
        assert counts["augmented"] == 1


class TestSplit:
    def test_floor_rule(self):
        tr, va = split([mk(i) for i in range(5)], 0.8, 0)
        assert len(tr) == 4 and len(va) == 1

    def test_same_seed_same_split(self):
        samples = [mk(i) for i in range(20)]
        assert split(samples, 0.8, 3) == split(samples, 0.8, 3)

    def test_different_seed_different_split(self):
        samples = [mk(i) for i in range(50)]
        assert split(samples, 0.8, 0) != split(samples, 0.8, 1)

    def test_partition(self):
        samples = [mk(i) for i in range(11)]
        tr, va = split(samples, 0.7, 5)
        assert sorted(s.id for s in tr + va) == sorted(s.id for s in samples)

    def test_rejects_bad_fraction(self):
        with pytest.raises(ValueError):
            split([mk(0)], 1.0, 0)


class TestBaseId:
    def test_plain_id(self):
        assert base_id("sc00-0012") == "sc00-0012"

    def test_augment_suffix_stripped(self):
        assert base_id("sc00-0012-a0") == "sc00-0012"
        assert base_id("sc00-0012-a13") == "sc00-0012"

    def test_non_numeric_tail_kept(self):
        assert base_id("sc00-abc") == "sc00-abc"


class TestSplitByBase:
    def make_family(self, n=10, copies=1):
        out = []
        for i in range(n):
            src = mk(i)
            out.append(src)
            for k in range(copies):
                out.append(mk(i, augmented=True, sid=f"{src.id}-a{k}"))
        return out

    def test_augmented_follow_their_source(self):
        samples = self.make_family(10, copies=2)
        tr, va = split_by_base(samples, 0.8, 0)
        train_bases = {base_id(s.id) for s in tr}
        for s in va:
            assert base_id(s.id) not in train_bases

    def test_val_side_is_clean(self):
        tr, va = split_by_base(self.make_family(10, copies=2), 0.8, 0)
        assert all(not s.augmented for s in va)

    def test_same_val_set_with_and_without_augmentation(self):
        # augmenting must not change which base samples land in validation,
        # otherwise augmented and plain training runs are not comparable
        plain = [mk(i) for i in range(20)]
        famil = self.make_family(20, copies=1)
        _, va_plain = split_by_base(plain, 0.8, 7)
        _, va_aug = split_by_base(famil, 0.8, 7)
        assert sorted(s.id for s in va_plain) == sorted(s.id for s in va_aug)

    def test_plain_manifest_matches_split(self):
        samples = [mk(i) for i in range(20)]
        assert split_by_base(samples, 0.8, 4) == split(samples, 0.8, 4)

    def test_raises_when_val_empty(self):
        with pytest.raises(ValueError):
            split_by_base([mk(0, augmented=True, sid="sc00-0000-a0")], 0.5, 0)


class TestStats:
    def test_single_sample(self):
        st = dataset_stats([mk(0, dist=2.5, speed=0.3)])
        assert st["dist_m"]["mean"] == 2.5
        assert st["dist_m"]["std"] == 0.0
        assert st["speed_mps"]["std"] == 0.0

    def test_population_convention(self):
        st = dataset_stats([mk(0, dist=1.0), mk(1, dist=3.0)])
        assert st["dist_m"]["mean"] == pytest.approx(2.0)
        assert st["dist_m"]["std"] == pytest.approx(1.0)

    def test_quartiles_present(self):
        st = dataset_stats([mk(i, dist=float(i)) for i in range(5)])
        assert st["dist_m"]["q1"] <= st["dist_m"]["median"] <= st["dist_m"]["q3"]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            dataset_stats([])
