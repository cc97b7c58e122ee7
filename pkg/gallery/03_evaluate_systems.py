"""Scoring two systems against archived forecast text.

Segments an archived forecast into per-area attribute fragments, scores a
perfect system and a noisy one with strict word-level precision/recall/F1,
and prints the comparison table with its Difference column.

    python gallery/03_evaluate_systems.py
"""

import random

from foghorn.evaluate import evaluate_systems, render_report_text
from foghorn.grammar import segment_forecast
from foghorn.grid import load_area_registry

FORECAST = """\
Low 984 at B2, deepening, moving easterly rapidly.

Viking. Southwesterly 5 to 7. Moderate or rough. Rain. Good, becoming moderate.

Forties. Westerly 7 to 9. Rough, becoming very rough. Squally showers. Moderate. Gale warning: severe gale soon.

Dover. Northerly 3 to 4. Slight. Fair. Good.

Wight, Portland. Northwesterly 2. Smooth. Fair. Good.
"""

registry = load_area_registry()
fragments = segment_forecast(FORECAST, registry)

records = []
for frag in fragments:
    if frag.kind != "attribute":
        continue
    records.append({"key": {"area": "+".join(frag.areas),
                            "attribute": frag.attribute,
                            "issue_time": "2024-12-01T00"},
                    "text": frag.text, "excluded": frag.excluded})

scorable = [r for r in records if not r["excluded"]]

perfect = [{"key": r["key"], "text": r["text"]} for r in scorable]

rng = random.Random(4)
noisy = []
for r in scorable:
    words = r["text"].split()
    if len(words) > 1 and rng.random() < 0.5:
        words[rng.randrange(len(words))] = "fog"
    noisy.append({"key": r["key"], "text": " ".join(words)})

report = evaluate_systems(records, {"rules": perfect, "degraded": noisy})
print(render_report_text(report))
