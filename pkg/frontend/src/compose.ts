/** The composed text: selected candidate labels, most recent last. */
export class CompositionBuffer {
  private labels: string[] = [];

  push(label: string): void {
    this.labels.push(label);
  }

  backspace(): boolean {
    return this.labels.pop() !== undefined;
  }

  clear(): void {
    this.labels = [];
  }

  get text(): string {
    return this.labels.join("");
  }

  get length(): number {
    return this.labels.length;
  }
}
