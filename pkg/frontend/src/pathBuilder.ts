/**
 * Path entry state for phase 2: tapping nodes appends their numbers to the
 * entry field, undo pops the last one, add commits the entry to the paths
 * list, and tapping a committed path asks to remove it.
 */

export class PathBuilderState {
  current: number[] = [];
  committed: number[][] = [];

  tap(nodeNumber: number): void {
    this.current.push(nodeNumber);
  }

  undo(): void {
    this.current.pop();
  }

  /** The entry field always shows the dash-joined tap sequence. */
  get entryText(): string {
    return this.current.join("-");
  }

  /** Commits the entry; refused with false when it is shorter than 2 taps. */
  add(): boolean {
    if (this.current.length < 2) return false;
    this.committed.push([...this.current]);
    this.current = [];
    return true;
  }

  removeAt(index: number): void {
    this.committed.splice(index, 1);
  }

  reset(): void {
    this.current = [];
    this.committed = [];
  }

  serialize(): number[][] {
    return this.committed.map((p) => [...p]);
  }
}
