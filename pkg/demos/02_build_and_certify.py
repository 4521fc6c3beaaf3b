"""Nested boxes for one system, then an independently checked certificate."""

from uniform_forge.checker import check_trace
from uniform_forge.engine import ConstructionSpec, construct, point_enclosure
from uniform_forge.exactnum import Box, parse_approx
from uniform_forge.families import AvoidanceSet, MatrixFamily
from uniform_forge.systems import parse_system
from uniform_forge.verifier import check_certificate, irrationality_report, produce_certificate

system, f = parse_system("std:1,2"), parse_approx("pow:1,3")
spec = ConstructionSpec(MatrixFamily(1, 2), [(system, f)], AvoidanceSet(2), Box.from_bounds([0, 0], [1, 1]), 8)
trace = construct(spec)

for record in trace.records:
    width = float(2 * record.box.radius[0])
    print(f"step {record.level}: T={record.threshold}  slice q={record.slice.q_vectors}  "
          f"avoids {record.avoided.describe()}  width {width:.3e}")

print("trace re-check:", bool(check_trace(trace.to_json())))

box = point_enclosure(trace)
cert = produce_certificate(box, system, f, trace.thresholds[0], trace.thresholds[-1])
print(f"{len(cert.covers)} covers, certificate re-check:", bool(check_certificate(cert)))

report = irrationality_report(trace, 3)
print("lines of height <= 3:", report.counts)
