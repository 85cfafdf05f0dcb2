//! Independent polyomino oracle: Redelmeier enumeration of fixed polyominoes with a
//! geometric column-convexity and perimeter test on every cell set.

use std::collections::BTreeMap;

/// Fixed polyomino totals by area, and column-convex ones by `(half_perimeter, area)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BruteCounts {
    pub area_max: usize,
    pub fixed_by_area: Vec<u64>,
    pub column_convex: BTreeMap<(u64, u64), u64>,
}

impl BruteCounts {
    /// Largest half-perimeter whose polygons all have area `<= area_max`.
    pub fn valid_hp_max(&self) -> u64 {
        let mut hp = 2;
        while (hp + 1) / 2 * ((hp + 2) / 2) <= self.area_max as u64 {
            hp += 1;
        }
        hp
    }

    pub fn count(&self, hp: u64, area: u64) -> u64 {
        self.column_convex.get(&(hp, area)).copied().unwrap_or(0)
    }
}

struct Search {
    n: usize,
    width: usize,
    seen: Vec<bool>,
    cells: Vec<(i32, i32)>,
    out: BruteCounts,
}

impl Search {
    fn index(&self, x: i32, y: i32) -> usize {
        y as usize * self.width + (x + self.n as i32) as usize
    }

    /// cells with `y > 0`, or `y == 0` and `x >= 0`, inside the bounding window
    fn allowed(&self, x: i32, y: i32) -> bool {
        (y > 0 || (y == 0 && x >= 0)) && y < self.n as i32 && x.abs() < self.n as i32
    }

    fn record(&mut self) {
        let k = self.cells.len();
        self.out.fixed_by_area[k] += 1;
        let mut columns: BTreeMap<i32, (i32, i32, i32)> = BTreeMap::new();
        let mut shared = 0;
        for (i, &(x, y)) in self.cells.iter().enumerate() {
            let e = columns.entry(x).or_insert((y, y, 0));
            e.0 = e.0.min(y);
            e.1 = e.1.max(y);
            e.2 += 1;
            for &(x2, y2) in &self.cells[i + 1..] {
                if (x - x2).abs() + (y - y2).abs() == 1 {
                    shared += 1;
                }
            }
        }
        if columns.values().all(|&(lo, hi, c)| hi - lo + 1 == c) {
            let perimeter = 4 * k as u64 - 2 * shared;
            *self.out.column_convex.entry((perimeter / 2, k as u64)).or_insert(0) += 1;
        }
    }

    fn grow(&mut self, mut untried: Vec<(i32, i32)>) {
        while let Some(cell) = untried.pop() {
            self.cells.push(cell);
            self.record();
            if self.cells.len() < self.n {
                let mut fresh = Vec::new();
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (x, y) = (cell.0 + dx, cell.1 + dy);
                    if !self.allowed(x, y) {
                        continue;
                    }
                    let i = self.index(x, y);
                    if !self.seen[i] {
                        self.seen[i] = true;
                        fresh.push((x, y));
                    }
                }
                let mut next = untried.clone();
                next.extend(fresh.iter().copied());
                self.grow(next);
                for (x, y) in fresh {
                    let i = self.index(x, y);
                    self.seen[i] = false;
                }
            }
            self.cells.pop();
        }
    }
}

/// Enumerates every fixed polyomino with at most `area_max` cells.
pub fn cc_brute_oracle(area_max: usize) -> BruteCounts {
    let n = area_max.max(1);
    let width = 2 * n + 1;
    let mut search = Search {
        n,
        width,
        seen: vec![false; width * (n + 1)],
        cells: Vec::with_capacity(n),
        out: BruteCounts { area_max, fixed_by_area: vec![0; n + 1], column_convex: BTreeMap::new() },
    };
    if area_max == 0 {
        return search.out;
    }
    let origin = search.index(0, 0);
    search.seen[origin] = true;
    search.grow(vec![(0, 0)]);
    search.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_counts() {
        let b = cc_brute_oracle(8);
        assert_eq!(b.fixed_by_area, vec![0, 1, 2, 6, 19, 63, 216, 760, 2725]);
        assert_eq!(b.count(2, 1), 1);
        assert_eq!(b.count(3, 2), 2);
        assert_eq!(b.valid_hp_max(), 5);
        assert_eq!(cc_brute_oracle(12).valid_hp_max(), 7);
    }
}
