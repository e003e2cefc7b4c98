"""Render every SVG the CLI can produce and parse each one as XML."""

import pathlib
import subprocess
import sys
import tempfile
from xml.dom import minidom


def main() -> int:
    exe, config = sys.argv[1], sys.argv[2]
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp)
        runs = [
            ["simulate", "--config", config, "--spectrum", out / "scan.svg",
             "--histogram", out / "hist.svg", "--emitters", out / "emitters.csv"],
            ["pl-spectrum", "--out", out / "pl.svg"],
            ["shift-curve", "--masses", "28,72,119,207", "--out", out / "curve.svg"],
            ["simulate", "--config", config, "--histogram", out / "hist.csv"],
            ["fit-hist", "--input", out / "hist.csv", "--min-height", "1", "--svg", out / "fit.svg"],
        ]
        for args in runs:
            result = subprocess.run([exe, *map(str, args)], capture_output=True, text=True)
            if result.returncode not in (0, 2):
                print(f"{args[0]} failed ({result.returncode}): {result.stderr}")
                return 1
        svgs = sorted(out.glob("*.svg"))
        if len(svgs) != 5:
            print(f"expected 5 SVG files, found {[p.name for p in svgs]}")
            return 1
        for path in svgs:
            doc = minidom.parse(str(path))
            root = doc.documentElement
            if root.tagName != "svg" or not root.getElementsByTagName("desc"):
                print(f"{path.name}: missing <svg> root or <desc>")
                return 1
            print(f"{path.name}: well-formed, {len(root.getElementsByTagName('polyline'))} polylines")
    return 0


if __name__ == "__main__":
    sys.exit(main())
