import { describe, expect, it } from "vitest";

import { buildTask, canSubmit, rectToPolygon, validateForm, type RoomForm } from "../src/form.js";

function goodForm(): RoomForm {
  return {
    roomType: "bedroom",
    floorWidth: 4,
    floorDepth: 5,
    objects: [
      { description: "double bed", quantity: 1, width: 1.8, depth: 2.0, height: 0.5 },
      { description: "nightstand", quantity: 2, width: 0.5, depth: 0.4, height: 0.55 },
      { description: "wardrobe", quantity: 1, width: 1.2, depth: 0.6, height: 2.0 },
      { description: "desk", quantity: 1, width: 1.2, depth: 0.6, height: 0.75 },
      { description: "desk chair", quantity: 1, width: 0.5, depth: 0.5, height: 0.9 },
    ],
  };
}

describe("rectToPolygon", () => {
  it("turns width x depth into a 4-vertex polygon", () => {
    expect(rectToPolygon(4, 5)).toEqual([
      [0, 0],
      [4, 0],
      [4, 5],
      [0, 5],
    ]);
  });

  it("keeps fractional dimensions exact", () => {
    const poly = rectToPolygon(2.5, 3.25);
    expect(poly).toHaveLength(4);
    expect(poly[2]).toEqual([2.5, 3.25]);
  });
});

describe("validateForm", () => {
  it("accepts a complete form", () => {
    expect(validateForm(goodForm())).toEqual([]);
    expect(canSubmit(goodForm())).toBe(true);
  });

  it("missing room type disables submission", () => {
    const form = { ...goodForm(), roomType: "" as const };
    const errors = validateForm(form);
    expect(errors.some((e) => e.field === "roomType")).toBe(true);
    expect(canSubmit(form)).toBe(false);
  });

  it("quantity 0 is an inline error on that row", () => {
    const form = goodForm();
    form.objects[1]!.quantity = 0;
    const errors = validateForm(form);
    expect(errors).toHaveLength(1);
    expect(errors[0]!.field).toBe("objects[1].quantity");
    expect(errors[0]!.message).toMatch(/positive/);
  });

  it("flags non-positive and non-finite dimensions", () => {
    const form = goodForm();
    form.floorWidth = 0;
    form.objects[0]!.depth = -1;
    form.objects[2]!.height = NaN;
    const fields = validateForm(form).map((e) => e.field);
    expect(fields).toContain("floorWidth");
    expect(fields).toContain("objects[0].depth");
    expect(fields).toContain("objects[2].height");
  });

  it("needs at least one object row", () => {
    const form = { ...goodForm(), objects: [] };
    expect(validateForm(form).map((e) => e.field)).toContain("objects");
  });

  it("rejects blank descriptions", () => {
    const form = goodForm();
    form.objects[0]!.description = "   ";
    expect(validateForm(form).map((e) => e.field)).toContain("objects[0].description");
  });
});

describe("buildTask", () => {
  it("produces the session-creation document", () => {
    const task = buildTask(goodForm());
    expect(task.room_type).toBe("bedroom");
    expect(task.instruction).toBe("");
    expect(task.floor.vertices).toEqual(rectToPolygon(4, 5));
    expect(task.objects).toHaveLength(5);
    expect(task.objects[0]).toEqual({
      description: "double bed",
      quantity: 1,
      bbox: { width: 1.8, depth: 2.0, height: 0.5 },
    });
  });

  it("refuses an invalid form so no request can be assembled", () => {
    const form = goodForm();
    form.objects[0]!.quantity = 0;
    expect(() => buildTask(form)).toThrow(/validation error/);
  });
});
