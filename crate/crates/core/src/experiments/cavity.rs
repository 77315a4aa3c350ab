use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::spectral::Grid;
use crate::topography::Topography;

/// Connected deep regions of the bed and which of them share a barrier.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityMap {
    pub grid: Grid,
    /// Per grid cell: cavity id starting at 1, or 0 on barriers and exterior.
    pub labels: Vec<u32>,
    pub count: u32,
    /// Pairs `(a, b)` with `a < b`, sorted.
    pub adjacency: Vec<(u32, u32)>,
}

impl CavityMap {
    pub fn label_at(&self, p: [f64; 2]) -> u32 {
        self.labels[self.grid.nearest(p)]
    }

    pub fn is_adjacent(&self, a: u32, b: u32) -> bool {
        let key = (a.min(b), a.max(b));
        self.adjacency.binary_search(&key).is_ok()
    }

    /// Mean position of each cavity's cells, unwrapped around the first cell.
    pub fn centroids(&self) -> Vec<[f64; 2]> {
        let l = self.grid.length;
        let mut anchor: Vec<Option<[f64; 2]>> = vec![None; self.count as usize];
        let mut sum = vec![[0.0; 2]; self.count as usize];
        let mut cells = vec![0usize; self.count as usize];
        for (i, &lab) in self.labels.iter().enumerate() {
            if lab == 0 {
                continue;
            }
            let c = (lab - 1) as usize;
            let p = self.grid.point(i);
            let a = *anchor[c].get_or_insert(p);
            for d in 0..2 {
                let off = p[d] - a[d];
                sum[c][d] += a[d] + off - l * (off / l).round();
            }
            cells[c] += 1;
        }
        sum.iter()
            .zip(&cells)
            .map(|(s, &m)| self.grid.wrap([s[0] / m as f64, s[1] / m as f64]))
            .collect()
    }
}

/// Labels the 4-connected (periodic) components of `{H > threshold}` in
/// row-major order of their first cell.
///
/// Two cavities are adjacent when some grid row or column passes from one to
/// the other across a barrier no wider than 1.5 times the narrowest barrier
/// found plus one cell. Diagonal neighbours never meet along a grid line and
/// so are never adjacent.
pub fn label_cavities(topo: &Topography, threshold: f64) -> Result<CavityMap> {
    let grid = topo.grid;
    let n = grid.n;
    let deep: Vec<bool> = topo.depth.values.iter().map(|&h| h > threshold).collect();
    let mut labels = vec![0u32; n * n];
    let mut count = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..n * n {
        if !deep[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (ix, iy) = (i % n, i / n);
            for j in [
                iy * n + (ix + 1) % n,
                iy * n + (ix + n - 1) % n,
                ((iy + 1) % n) * n + ix,
                ((iy + n - 1) % n) * n + ix,
            ] {
                if deep[j] && labels[j] == 0 {
                    labels[j] = count;
                    queue.push_back(j);
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::config(format!("no cavity deeper than {threshold} found")));
    }

    let mut gaps: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut scan = |line: &dyn Fn(usize) -> usize| {
        let seq: Vec<u32> = (0..n).map(|i| labels[line(i)]).collect();
        let Some(first) = seq.iter().position(|&l| l != 0) else {
            return;
        };
        let mut prev = seq[first];
        let mut gap = 0;
        for step in 1..=n {
            let l = seq[(first + step) % n];
            if l == 0 {
                gap += 1;
                continue;
            }
            if l != prev && gap > 0 {
                let key = (prev.min(l), prev.max(l));
                let e = gaps.entry(key).or_insert(gap);
                *e = (*e).min(gap);
            }
            prev = l;
            gap = 0;
        }
    };
    for r in 0..n {
        scan(&|i| r * n + i);
        scan(&|i| i * n + r);
    }
    let narrowest = gaps.values().copied().min().unwrap_or(0) as f64;
    let adjacency = gaps
        .into_iter()
        .filter(|(_, g)| *g as f64 <= 1.5 * narrowest + 1.0)
        .map(|(k, _)| k)
        .collect();
    Ok(CavityMap {
        grid,
        labels,
        count,
        adjacency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topography::{cavities, flat, CavitySpec};

    fn spec(rows: usize, cols: usize) -> CavitySpec {
        CavitySpec {
            rows,
            cols,
            well_width: 2.0,
            barrier_width: 0.5,
            deep_depth: 1.0,
            shallow_depth: 0.1,
            smoothing: 0.25,
        }
    }

    #[test]
    fn flat_bed_is_one_cavity() {
        let g = Grid::new(4.0, 16).unwrap();
        let m = label_cavities(&flat(g, 1.0).unwrap(), 0.5).unwrap();
        assert_eq!(m.count, 1);
        assert!(m.labels.iter().all(|&l| l == 1));
        assert!(m.adjacency.is_empty());
        assert!(label_cavities(&flat(g, 1.0).unwrap(), 2.0).is_err());
    }

    #[test]
    fn two_wells_share_one_barrier() {
        let g = Grid::new(8.0, 64).unwrap();
        let m = label_cavities(&cavities(g, spec(1, 2)).unwrap(), 0.55).unwrap();
        assert_eq!(m.count, 2);
        assert_eq!(m.adjacency, vec![(1, 2)]);
        let c = spec(1, 2).centres(8.0);
        assert_eq!(m.label_at(c[0]), 1);
        assert_eq!(m.label_at(c[1]), 2);
        assert_eq!(m.label_at([0.1, 0.1]), 0);
    }

    #[test]
    fn three_by_three_grid() {
        let g = Grid::new(12.0, 128).unwrap();
        let m = label_cavities(&cavities(g, spec(3, 3)).unwrap(), 0.55).unwrap();
        assert_eq!(m.count, 9);
        assert_eq!(m.adjacency.len(), 12);
        assert!(m.is_adjacent(1, 2) && m.is_adjacent(2, 1) && !m.is_adjacent(1, 5));
    }
}
