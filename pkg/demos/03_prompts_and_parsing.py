"""
From task to prompt to parsed layout
=====================================

The round trip at the heart of the toolkit: a structured room task is
rendered into a meta prompt, a backend completes it, and the completion
is parsed back into a validated layout.  Here the backend is the
deterministic template mock, so this runs offline.
"""

from layoutforge.evalkit import render_svg, validate
from layoutforge.gateway import Gateway, TemplateBackend
from layoutforge.prompts import build_generation_prompt, parse_completion
from layoutforge.scene import BoxSize, FloorPlan, ObjectSpec, RoomType, TaskSpec

task = TaskSpec(
    room_type=RoomType.BEDROOM,
    floor=FloorPlan(((0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0))),
    objects=(
        ObjectSpec("double bed", 1, BoxSize(1.8, 2.0, 0.5)),
        ObjectSpec("nightstand", 2, BoxSize(0.5, 0.4, 0.55)),
        ObjectSpec("wardrobe", 1, BoxSize(1.2, 0.6, 2.0)),
    ),
)

bundle = build_generation_prompt(task)
print("template:", bundle.template_id)
print("fingerprint:", bundle.fingerprint())  # changes iff the rendered text changes
print("--- first lines of the user message ---")
for line in bundle.user_text.splitlines()[:6]:
    print("|", line)

# any chat backend takes (bundle, params) -> completion text
gateway = Gateway(TemplateBackend())
text = gateway.complete(bundle)
print("\ncompletion is", len(text), "chars; tail:")
print("|", text.splitlines()[-1])

# the parser finds the layout block wherever the model put it; passing
# the task lets sparse completions borrow declared sizes
parsed = parse_completion(text, task=task)
print("\nreasoning snippet:", parsed.reasoning[:60], "...")
for obj in parsed.layout.objects:
    p = obj.placement
    print(f"  {obj.instance_id:14s} at ({p.x:5.2f}, {p.y:5.2f})  rot {p.rotation:.2f}")

report = validate(parsed.layout, task=task)
print("\nusable:", report.usable, "| OOR:", report.oor, "| counts match:", report.count_match)

svg = render_svg(parsed.layout)
out = "/tmp/bedroom_demo.svg"
with open(out, "w", encoding="utf-8") as fh:
    fh.write(svg)
print("wrote", out, f"({len(svg)} bytes; open it in a browser)")
