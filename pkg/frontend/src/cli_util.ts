export function run(fn: () => void): void {
  try {
    fn();
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}

export function usage(msg: string): never {
  console.error(msg);
  process.exit(2);
}
