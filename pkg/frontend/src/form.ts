/** Room setup form logic: field validation and the task document it submits.
 *
 * The one piece of geometry this client is allowed to construct: a floor
 * entered as width x depth becomes a 4-vertex polygon here, because the
 * service speaks polygons only.  Everything else geometric comes back from
 * the service.
 */

import type { RoomType, TaskDoc, TaskObjectDoc } from "./types.js";
import { ROOM_TYPES } from "./types.js";

export interface ObjectRow {
  description: string;
  quantity: number;
  width: number;
  depth: number;
  height: number;
}

export interface RoomForm {
  roomType: RoomType | "";
  floorWidth: number;
  floorDepth: number;
  objects: ObjectRow[];
}

export interface FieldError {
  /** which input the message belongs to, e.g. "floorWidth", "objects[2].quantity" */
  field: string;
  message: string;
}

function positive(value: number): boolean {
  return Number.isFinite(value) && value > 0;
}

/** Inline validation messages; empty list means the form is submittable. */
export function validateForm(form: RoomForm): FieldError[] {
  const errors: FieldError[] = [];
  if (!form.roomType) {
    errors.push({ field: "roomType", message: "pick a room type" });
  } else if (!(ROOM_TYPES as readonly string[]).includes(form.roomType)) {
    errors.push({ field: "roomType", message: `unknown room type '${form.roomType}'` });
  }
  if (!positive(form.floorWidth)) {
    errors.push({ field: "floorWidth", message: "floor width must be > 0" });
  }
  if (!positive(form.floorDepth)) {
    errors.push({ field: "floorDepth", message: "floor depth must be > 0" });
  }
  if (form.objects.length === 0) {
    errors.push({ field: "objects", message: "add at least one object" });
  }
  form.objects.forEach((row, i) => {
    if (!row.description.trim()) {
      errors.push({ field: `objects[${i}].description`, message: "description required" });
    }
    if (!Number.isInteger(row.quantity) || row.quantity <= 0) {
      errors.push({ field: `objects[${i}].quantity`, message: "quantity must be a positive integer" });
    }
    for (const dim of ["width", "depth", "height"] as const) {
      if (!positive(row[dim])) {
        errors.push({ field: `objects[${i}].${dim}`, message: `${dim} must be > 0` });
      }
    }
  });
  return errors;
}

export function canSubmit(form: RoomForm): boolean {
  return validateForm(form).length === 0;
}

/** width x depth rectangle -> 4-vertex polygon, origin corner first, CCW. */
export function rectToPolygon(width: number, depth: number): [number, number][] {
  return [
    [0, 0],
    [width, 0],
    [width, depth],
    [0, depth],
  ];
}

/** Form -> the task document POSTed to /sessions. Call only when canSubmit. */
export function buildTask(form: RoomForm): TaskDoc {
  const errors = validateForm(form);
  if (errors.length > 0) {
    throw new Error(`form has ${errors.length} validation error(s): ${errors[0]!.message}`);
  }
  const objects: TaskObjectDoc[] = form.objects.map((row) => ({
    description: row.description.trim(),
    quantity: row.quantity,
    bbox: { width: row.width, depth: row.depth, height: row.height },
  }));
  return {
    instruction: "",
    room_type: form.roomType as RoomType,
    floor: { vertices: rectToPolygon(form.floorWidth, form.floorDepth) },
    objects,
  };
}
