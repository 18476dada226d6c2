# Copyright 2026 The lckit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os
import tempfile
import textwrap
import unittest

import lckit


def small_recording(tmpdir):
    """A 2-track lower-roadway recording, 300 frames at 25 Hz."""
    tracks = ["frame,id,x,y,width,height,xVelocity,yVelocity,xAcceleration,yAcceleration,laneId"]
    for f in range(300):
        t = f / 25.0
        tracks.append(f"{f},1,{50 + 30 * t:.4f},26.625,4.5,2.0,30.0,0.0,0.0,0.0,7")
        tracks.append(f"{f},2,{90 + 25 * t:.4f},26.625,4.5,2.0,25.0,0.0,0.0,0.0,7")
    paths = {}
    contents = {
        "01_tracks.csv": "\n".join(tracks) + "\n",
        "01_tracksMeta.csv": "id,class,drivingDirection\n1,Car,2\n2,Truck,2\n",
        "01_recordingMeta.csv": (
            "id,frameRate,upperLaneMarkings,lowerLaneMarkings\n"
            "1,25,2.0;5.75;9.5;13.25,21.0;24.75;28.5;32.25\n"
        ),
    }
    for name, content in contents.items():
        path = os.path.join(tmpdir, name)
        with open(path, "w") as handle:
            handle.write(content)
        paths[name] = path
    return paths


class SmokeTest(unittest.TestCase):
    def test_version(self):
        self.assertEqual(lckit.__version__, "0.1.0")
        self.assertEqual(lckit.TRAJECTORY_POINTS, 8)

    def test_load_and_sample(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            paths = small_recording(tmpdir)
            rec = lckit.load_recording(
                paths["01_tracks.csv"], paths["01_tracksMeta.csv"], paths["01_recordingMeta.csv"]
            )
            self.assertEqual(rec.track_count(), 2)
            self.assertEqual(rec.meta.frame_rate, 25.0)

            plan = lckit.StratificationPlan()
            plan.seed = 11
            plan.lk = 3
            snapshots, warnings = lckit.sample_dataset([rec], plan)
            self.assertEqual(len(snapshots), 3)
            self.assertEqual(warnings, [])
            again, _ = lckit.sample_dataset([rec], plan)
            self.assertEqual(
                [s.sample_id for s in snapshots], [s.sample_id for s in again]
            )

            counts = lckit.candidate_counts([rec], plan)
            self.assertGreater(counts["LK"], 0)
            self.assertEqual(counts["LLC/T01"], 0)

            snap = snapshots[0]
            self.assertEqual(snap.gt_intention, lckit.Intention.KeepLane)
            self.assertEqual(snap.map.lane_count, 3)
            self.assertEqual(snap.history[-1].x, 0.0)

    def test_labeling_and_codec_roundtrip(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            paths = small_recording(tmpdir)
            rec = lckit.load_recording(
                paths["01_tracks.csv"], paths["01_tracksMeta.csv"], paths["01_recordingMeta.csv"]
            )
            plan = lckit.StratificationPlan()
            plan.seed = 2
            plan.lk = 2
            snapshots, _ = lckit.sample_dataset([rec], plan)
            snap = snapshots[0]

            annotation = lckit.annotate(snap)
            prompt = lckit.render_user_message(snap)
            self.assertIn("Surrounding vehicles:", prompt)
            self.assertIn("km/h", prompt)

            sample = lckit.make_llama_sample(snap, lckit.PromptMode.Training)
            self.assertTrue(sample.startswith("<s>[INST] <<SYS>>"))
            self.assertTrue(sample.endswith("</s>"))

            answer = lckit.render_answer(annotation, snap.gt_intention, snap.gt_trajectory)
            record = lckit.parse_prediction(answer)
            self.assertTrue(record.ok())
            self.assertEqual(record.intention, snap.gt_intention)
            self.assertEqual(record.behavior, annotation.behavior)

    def test_rule_based_predict_and_report(self):
        snapshots = lckit.generate_all_families()
        self.assertEqual(len(snapshots), 240)

        records = [lckit.rule_based_predict(s) for s in snapshots]
        for snap, record in zip(snapshots, records):
            record.sample_id = snap.sample_id
            self.assertTrue(record.ok())

        report = lckit.build_report(snapshots, records)
        self.assertEqual(report.total_samples, 240)
        self.assertEqual(report.failed_intention, 0)
        self.assertEqual(report.rmse_support, 0)  # synthetic ground truth
        table = lckit.emit_report(report, "text")
        self.assertIn("Intention prediction", table)

    def test_metrics(self):
        pairs = [(lckit.Intention.KeepLane, lckit.Intention.KeepLane)] * 8
        pairs += [(lckit.Intention.KeepLane, lckit.Intention.LeftLaneChange)] * 2
        pairs += [(lckit.Intention.LeftLaneChange, lckit.Intention.LeftLaneChange)] * 9
        pairs += [(lckit.Intention.LeftLaneChange, lckit.Intention.KeepLane)]
        pairs += [(lckit.Intention.RightLaneChange, lckit.Intention.RightLaneChange)] * 10
        metrics = lckit.intention_metrics(pairs)
        self.assertAlmostEqual(metrics.llc.precision, 9 / 11, places=12)
        self.assertAlmostEqual(metrics.llc.recall, 0.9, places=12)

        gt = lckit.CotAnnotation()
        gt.behavior = lckit.Behavior.NormalKeep
        self.assertEqual(lckit.cot_score(gt, set(), lckit.Behavior.NormalKeep), 100)
        self.assertEqual(
            lckit.cot_score(gt, {lckit.Feature.AheadFree}, lckit.Behavior.NormalKeep), 90
        )

    def test_archive_files(self):
        snapshots = lckit.generate_family(
            lckit.default_family(lckit.ScenarioFamilyName.LeftFrontBraking)
        )
        entries = []
        for snap in snapshots[:5]:
            entry = lckit.ArchiveEntry()
            entry.snapshot = snap
            entry.cot = lckit.annotate(snap)
            entries.append(entry)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, "snapshots.jsonl")
            lckit.write_snapshot_archive(path, entries)
            back = lckit.read_snapshot_archive(path)
            self.assertEqual(len(back), 5)
            self.assertEqual(back[0].snapshot.sample_id, entries[0].snapshot.sample_id)
            self.assertEqual(back[0].cot.behavior, entries[0].cot.behavior)

    def test_errors_surface_as_exceptions(self):
        with self.assertRaises(lckit.LckitError):
            lckit.intention_metrics([])
        with self.assertRaises(lckit.LckitError):
            lckit.bucket_for(5.0)


if __name__ == "__main__":
    unittest.main()
