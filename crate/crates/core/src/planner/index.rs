//! Uniform bucket grid over node configurations.

use crate::geometry::{Config, Rect};
use crate::scalar::Real;

/// Buckets points by cell. Queries are exact: results match a linear scan
/// ordered by `(squared distance, id)`.
#[derive(Debug, Clone)]
pub struct SpatialIndex<T> {
    origin: Config<T>,
    cell: T,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
    points: Vec<Config<T>>,
}

const MAX_CELLS_PER_AXIS: usize = 256;

impl<T: Real> SpatialIndex<T> {
    /// `min_cell` bounds the cell size from below, typically the largest
    /// query radius, so radius queries touch few cells.
    pub fn new(bounds: Rect<T>, min_cell: T) -> Self {
        let extent = bounds.width().max(bounds.height());
        let floor = extent / T::lit(MAX_CELLS_PER_AXIS as f64);
        let cell = if min_cell.is_finite() && min_cell > floor {
            min_cell
        } else {
            floor
        };
        let count = |len: T| ((len / cell).ceil().to_usize().unwrap_or(1)).max(1);
        let (nx, ny) = (count(bounds.width()), count(bounds.height()));
        SpatialIndex {
            origin: bounds.min,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: usize) -> Config<T> {
        self.points[id]
    }

    /// Cell coordinates, clamped into the grid.
    fn cell_of(&self, p: Config<T>) -> (usize, usize) {
        let idx = |v: T, o: T, n: usize| {
            let f = ((v - o) / self.cell).floor();
            if f <= T::zero() {
                0
            } else {
                f.to_usize().unwrap_or(usize::MAX).min(n - 1)
            }
        };
        (
            idx(p.x, self.origin.x, self.nx),
            idx(p.y, self.origin.y, self.ny),
        )
    }

    fn inside(&self, p: Config<T>) -> bool {
        let max_x = self.origin.x + self.cell * T::lit(self.nx as f64);
        let max_y = self.origin.y + self.cell * T::lit(self.ny as f64);
        p.x >= self.origin.x && p.y >= self.origin.y && p.x <= max_x && p.y <= max_y
    }

    /// Appends a point; ids are dense insertion indices.
    pub fn insert(&mut self, p: Config<T>) -> usize {
        let id = self.points.len();
        let (i, j) = self.cell_of(p);
        self.cells[j * self.nx + i].push(id);
        self.points.push(p);
        id
    }

    fn better(a: (T, usize), b: (T, usize)) -> bool {
        a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
    }

    /// Closest point, ties to the lowest id.
    pub fn nearest(&self, q: Config<T>) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        if !self.inside(q) {
            return self.scan_nearest(q);
        }
        let (ci, cj) = self.cell_of(q);
        let mut best: Option<(T, usize)> = None;
        let max_ring = self.nx.max(self.ny);
        for r in 0..=max_ring {
            self.for_ring(ci, cj, r, |id| {
                let cand = (self.points[id].dist_sq(q), id);
                if best.is_none_or(|b| Self::better(cand, b)) {
                    best = Some(cand);
                }
            });
            if let Some((d2, _)) = best {
                // Anything in ring r + 1 or beyond is at least r cells away.
                let reach = self.cell * T::lit(r as f64);
                if d2 < reach * reach {
                    break;
                }
            }
        }
        best.map(|b| b.1)
    }

    fn scan_nearest(&self, q: Config<T>) -> Option<usize> {
        let mut best: Option<(T, usize)> = None;
        for (id, p) in self.points.iter().enumerate() {
            let cand = (p.dist_sq(q), id);
            if best.is_none_or(|b| Self::better(cand, b)) {
                best = Some(cand);
            }
        }
        best.map(|b| b.1)
    }

    fn for_ring(&self, ci: usize, cj: usize, r: usize, mut f: impl FnMut(usize)) {
        let (ci, cj, r) = (ci as isize, cj as isize, r as isize);
        let mut visit = |i: isize, j: isize| {
            if i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny {
                for &id in &self.cells[j as usize * self.nx + i as usize] {
                    f(id);
                }
            }
        };
        if r == 0 {
            visit(ci, cj);
            return;
        }
        for i in ci - r..=ci + r {
            visit(i, cj - r);
            visit(i, cj + r);
        }
        for j in cj - r + 1..cj + r {
            visit(ci - r, j);
            visit(ci + r, j);
        }
    }

    /// Points with `|p - q| <= radius`, sorted by distance then id, as
    /// `(id, squared distance)`.
    pub fn within(&self, q: Config<T>, radius: T) -> Vec<(usize, T)> {
        let mut out = Vec::new();
        // Written so that a NaN radius also returns nothing.
        let usable = radius >= T::zero();
        if !usable || self.points.is_empty() {
            return out;
        }
        let r2 = radius * radius;
        let lo = self.cell_of(Config::new(q.x - radius, q.y - radius));
        let hi = self.cell_of(Config::new(q.x + radius, q.y + radius));
        for j in lo.1..=hi.1 {
            for i in lo.0..=hi.0 {
                for &id in &self.cells[j * self.nx + i] {
                    let d2 = self.points[id].dist_sq(q);
                    if d2 <= r2 {
                        out.push((id, d2));
                    }
                }
            }
        }
        out.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        out
    }

    /// Heap bytes held by the index.
    pub fn heap_bytes(&self) -> usize {
        self.points.capacity() * std::mem::size_of::<Config<T>>()
            + self.cells.capacity() * std::mem::size_of::<Vec<usize>>()
            + self
                .cells
                .iter()
                .map(|c| c.capacity() * std::mem::size_of::<usize>())
                .sum::<usize>()
    }
}
