/** Append-only per-agent indicator series with a bounded window. */

export interface TrendPoint {
  cycle: number;
  ai: number;
  pi: number;
}

export class IndicatorHistory {
  private points: TrendPoint[] = [];

  constructor(readonly capacity = 300) {}

  /** Appends once per cycle; repeated snapshots of one cycle are ignored. */
  push(cycle: number, ai: number, pi: number): void {
    const last = this.points[this.points.length - 1];
    if (last && cycle <= last.cycle) {
      return;
    }
    this.points.push({ cycle, ai, pi });
    if (this.points.length > this.capacity) {
      this.points.splice(0, this.points.length - this.capacity);
    }
  }

  get series(): readonly TrendPoint[] {
    return this.points;
  }

  get length(): number {
    return this.points.length;
  }
}
