//! Nearest-known-pixel search on the pixel grid.
//!
//! Candidates are visited in order of squared distance, ties broken by lower
//! row then lower column, which pins the neighbour set for every target.

use std::cell::OnceCell;

use crate::plane::{PixelMask, TileRect};

#[derive(Clone, Debug)]
pub struct NeighborSearch {
    radius: i64,
    offsets: Vec<(i64, i64)>,
    wide: OnceCell<(i64, Vec<(i64, i64)>)>,
}

fn disk(radius: i64) -> Vec<(i64, i64)> {
    let r2 = radius * radius;
    let mut v: Vec<(i64, i64)> = (-radius..=radius)
        .flat_map(|dy| (-radius..=radius).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| dx * dx + dy * dy <= r2)
        .collect();
    v.sort_by_key(|&(dx, dy)| (dx * dx + dy * dy, dy, dx));
    v
}

impl NeighborSearch {
    pub fn new(radius: usize) -> Self {
        let radius = radius.max(1) as i64;
        NeighborSearch {
            radius,
            offsets: disk(radius),
            wide: OnceCell::new(),
        }
    }

    /// Up to `k` known pixels of `window` nearest to `(x, y)`.
    pub fn nearest(
        &self,
        mask: &PixelMask,
        window: TileRect,
        x: usize,
        y: usize,
        k: usize,
    ) -> Vec<(usize, usize)> {
        let found = scan(&self.offsets, mask, window, x, y, k);
        let reach = ((window.w * window.w + window.h * window.h) as f64).sqrt().ceil() as i64;
        if found.len() >= k || self.radius >= reach {
            return found;
        }
        // The disk was too small for this window; retry with one that covers it.
        let (r, wide) = self.wide.get_or_init(|| (reach, disk(reach)));
        if *r < reach {
            return scan(&disk(reach), mask, window, x, y, k);
        }
        scan(wide, mask, window, x, y, k)
    }
}

fn scan(
    offsets: &[(i64, i64)],
    mask: &PixelMask,
    window: TileRect,
    x: usize,
    y: usize,
    k: usize,
) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(k);
    let (x, y) = (x as i64, y as i64);
    for &(dx, dy) in offsets {
        let (nx, ny) = (x + dx, y + dy);
        if nx < window.x0 as i64
            || ny < window.y0 as i64
            || nx >= window.x1() as i64
            || ny >= window.y1() as i64
        {
            continue;
        }
        let (nx, ny) = (nx as usize, ny as usize);
        if !mask.is_unknown(nx, ny) {
            out.push((nx, ny));
            if out.len() == k {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_tie_break() {
        let m = PixelMask::empty(9, 9);
        let s = NeighborSearch::new(4);
        let n = s.nearest(&m, TileRect::full(9, 9), 4, 4, 5);
        // Self first, then the four axis neighbours: up, left, right, down.
        assert_eq!(n, vec![(4, 4), (4, 3), (3, 4), (5, 4), (4, 5)]);
    }

    #[test]
    fn skips_unknown_and_respects_window() {
        let mut m = PixelMask::empty(10, 10);
        m.set(5, 5, true);
        m.set(5, 4, true);
        let s = NeighborSearch::new(3);
        let n = s.nearest(&m, TileRect::new(5, 0, 5, 10), 5, 5, 2);
        assert_eq!(n, vec![(6, 5), (5, 6)]);
    }

    #[test]
    fn grows_past_small_disk() {
        let m = PixelMask::from_fn(64, 64, |x, _| x < 60);
        let s = NeighborSearch::new(2);
        let n = s.nearest(&m, TileRect::full(64, 64), 0, 0, 3);
        assert_eq!(n, vec![(60, 0), (60, 1), (60, 2)]);
    }
}
