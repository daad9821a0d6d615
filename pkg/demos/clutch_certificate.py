"""From a clutching map on S^2 x S^1 to a lower bound on the bifurcation set.

The degree is computed on the product of spheres, then fed to the mod-2
criterion with a five-dimensional parameter space.
"""

import json

from symdeg import cli

code, report = cli.run("certify", "gallery:su2-clutch")
deg = report["degrees"][0]
print(f"degree {deg['snapped']} (raw {deg['raw']['re']:+.6f}), exit code {code}")
for cert in report["certificates"]:
    print(f"{cert['theorem']}: {cert['status']}  bound={cert.get('bound')}")
    for line in cert.get("arithmetic_trace", []):
        print("   ", line)
print("summary:", json.dumps(report["summary"], indent=2))
