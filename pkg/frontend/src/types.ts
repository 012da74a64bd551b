/** JSON shapes exchanged with the session service.
 *
 * These mirror the service's documents field-for-field; the client never
 * derives geometry or validation facts of its own from them — it only
 * displays what the service said.  Lengths are metres, angles radians
 * (counter-clockwise about +z), floor in the x/y plane.
 */

export type RoomType = "bedroom" | "living_room" | "kitchen" | "bathroom";

export const ROOM_TYPES: readonly RoomType[] = [
  "bedroom",
  "living_room",
  "kitchen",
  "bathroom",
];

export interface BoxDoc {
  width: number;
  depth: number;
  height: number;
}

export interface TaskObjectDoc {
  description: string;
  quantity: number;
  bbox?: BoxDoc;
}

export interface TaskDoc {
  instruction: string;
  room_type: RoomType;
  floor: { vertices: [number, number][] };
  objects: TaskObjectDoc[];
}

export interface ObjectDoc {
  instance_id: string;
  description: string;
  bbox: BoxDoc;
  coordinates: { x: number; y: number; z: number };
  rotate: { angle: number };
}

export interface LayoutDoc {
  room_type: RoomType;
  floor: { vertices: [number, number][] };
  objects: ObjectDoc[];
}

export interface ReportDoc {
  oor: number;
  pair_overlaps: { first: string; second: string; area: number }[];
  boundary_violations: { instance_id: string; area: number }[];
  count_match: boolean;
  usable: boolean;
}

export interface HistoryEntryDoc {
  index: number;
  instruction: string | null; // null marks the initial generation
  layout: LayoutDoc;
  report: ReportDoc;
  timestamp: number;
}

export interface LayoutAndReport {
  layout: LayoutDoc;
  report: ReportDoc;
}
