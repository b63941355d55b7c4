// Piecewise-linear walk through viridis anchor colors; t in [0, 1].
const ANCHORS: Array<[number, number, number]> = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export function viridis(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (ANCHORS.length - 1);
  const i = Math.min(ANCHORS.length - 2, Math.floor(x));
  const w = x - i;
  const channel = (a: number, b: number) => Math.round(a + (b - a) * w);
  const [r0, g0, b0] = ANCHORS[i];
  const [r1, g1, b1] = ANCHORS[i + 1];
  return `rgb(${channel(r0, r1)},${channel(g0, g1)},${channel(b0, b1)})`;
}
