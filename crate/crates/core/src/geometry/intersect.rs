use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{cross, PlanarCurve, Point};

/// Crossings at angles below this are reported but flagged unreliable.
pub const TANGENTIAL_ANGLE: f64 = 1e-3;

/// A transverse crossing of two segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub point: Point,
    /// Segment indices, `first < second` for self-crossings.
    pub segments: (usize, usize),
    /// Position of the crossing inside each segment, in `[0, 1)`.
    pub params: (f64, f64),
    /// Unsigned angle between the segments, in `[0, pi/2]`.
    pub angle: f64,
    pub unreliable: bool,
}

/// Intersection of segments `[a, b]` and `[c, d]` with both parameters in the
/// half-open range `[0, 1)`, so a crossing exactly at a shared node is seen
/// from one segment pair only. Parallel segments never intersect here.
pub fn segment_intersection(a: Point, b: Point, c: Point, d: Point) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let denom = cross(r, s);
    if denom.abs() <= 1e-14 * r.norm() * s.norm() {
        return None;
    }
    let ac = c - a;
    let u = cross(ac, s) / denom;
    let v = cross(ac, r) / denom;
    if (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v) {
        Some((u, v))
    } else {
        None
    }
}

fn crossing_of(a: Point, b: Point, c: Point, d: Point, segments: (usize, usize)) -> Option<Crossing> {
    let (u, v) = segment_intersection(a, b, c, d)?;
    let r = b - a;
    let s = d - c;
    let angle = (cross(r, s).abs() / (r.norm() * s.norm())).clamp(0.0, 1.0).asin();
    Some(Crossing {
        point: a + r * u,
        segments,
        params: (u, v),
        angle,
        unreliable: angle < TANGENTIAL_ANGLE,
    })
}

type Cell = (i64, i64);

struct Grid {
    cell: f64,
    origin: Point,
    buckets: HashMap<Cell, Vec<usize>>,
}

impl Grid {
    fn new(cell: f64, origin: Point) -> Self {
        Grid {
            cell,
            origin,
            buckets: HashMap::new(),
        }
    }

    fn cells(&self, a: Point, b: Point) -> impl Iterator<Item = Cell> {
        let f = |x: f64, o: f64| ((x - o) / self.cell).floor() as i64;
        let (x0, x1) = (f(a.re.min(b.re), self.origin.re), f(a.re.max(b.re), self.origin.re));
        let (y0, y1) = (f(a.im.min(b.im), self.origin.im), f(a.im.max(b.im), self.origin.im));
        (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
    }

    fn insert(&mut self, idx: usize, a: Point, b: Point) {
        let cells: Vec<Cell> = self.cells(a, b).collect();
        for c in cells {
            self.buckets.entry(c).or_default().push(idx);
        }
    }
}

fn grid_cell(curves: &[&PlanarCurve]) -> (f64, Point) {
    let mut all_max = 0.0f64;
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut diam = 0.0f64;
    for c in curves {
        all_max = all_max.max(c.max_spacing());
        diam = diam.max(c.bbox_diameter());
        for p in c.nodes() {
            lo = Point::new(lo.re.min(p.re), lo.im.min(p.im));
        }
    }
    // keep the bucket count bounded even for very uneven curves
    (all_max.max(diam / 4096.0), lo)
}

/// All transverse crossings between non-adjacent segments of one curve, each
/// reported once, sorted by segment pair.
pub fn self_intersections(curve: &PlanarCurve) -> Vec<Crossing> {
    let n = curve.len();
    let segs = curve.segment_count();
    let (cell, origin) = grid_cell(&[curve]);
    let mut grid = Grid::new(cell, origin);
    for i in 0..segs {
        let (a, b) = curve.segment(i);
        grid.insert(i, a, b);
    }
    let adjacent = |i: usize, j: usize| {
        j - i <= 1 || (curve.is_closed() && i == 0 && j == n - 1)
    };
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for bucket in grid.buckets.values() {
        for (k, &i) in bucket.iter().enumerate() {
            for &j in &bucket[k + 1..] {
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                if !adjacent(i, j) {
                    pairs.push((i, j));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
        .into_iter()
        .filter_map(|(i, j)| {
            let (a, b) = curve.segment(i);
            let (c, d) = curve.segment(j);
            crossing_of(a, b, c, d, (i, j))
        })
        .collect()
}

/// All transverse crossings between two curves, `segments.0` indexing the
/// first curve. Shared origin nodes count as one crossing at the origin.
pub fn cross_intersections(first: &PlanarCurve, second: &PlanarCurve) -> Vec<Crossing> {
    let (cell, origin) = grid_cell(&[first, second]);
    let mut grid = Grid::new(cell, origin);
    for j in 0..second.segment_count() {
        let (c, d) = second.segment(j);
        grid.insert(j, c, d);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..first.segment_count() {
        let (a, b) = first.segment(i);
        for cell in grid.cells(a, b) {
            if let Some(bucket) = grid.buckets.get(&cell) {
                pairs.extend(bucket.iter().map(|&j| (i, j)));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
        .into_iter()
        .filter_map(|(i, j)| {
            let (a, b) = first.segment(i);
            let (c, d) = second.segment(j);
            crossing_of(a, b, c, d, (i, j))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::{circle, figure_eight, ray};

    #[test]
    fn figure_eight_has_one_crossing() {
        let c = figure_eight(1.0, 200);
        let x = self_intersections(&c);
        assert_eq!(x.len(), 1);
        assert!(x[0].point.norm() < 1e-2);
        assert!(!x[0].unreliable);
    }

    #[test]
    fn embedded_circle_has_none() {
        assert!(self_intersections(&circle(Point::new(0.5, 0.5), 2.0, 300)).is_empty());
    }

    #[test]
    fn crossing_at_node_counted_once() {
        // the crossing point is a node of both strands
        let c = PlanarCurve::open(vec![
            Point::new(-1.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, 0.0) + Point::new(0.0, 1e-3),
            Point::new(0.0, -1.0),
        ])
        .unwrap();
        assert_eq!(self_intersections(&c).len(), 1);
    }

    #[test]
    fn shallow_crossing_flagged() {
        let c = PlanarCurve::open(vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 1.0),
            Point::new(5.0, 1.0),
            Point::new(4.0, 0.0005),
            Point::new(-4.0, -0.0005),
        ])
        .unwrap();
        let x = self_intersections(&c);
        assert_eq!(x.len(), 1);
        assert!(x[0].unreliable);
    }

    #[test]
    fn two_rays_meet_at_origin_only() {
        let a = ray(0.3, 5.0, 0.1);
        let b = ray(2.0, 5.0, 0.1);
        let x = cross_intersections(&a, &b);
        assert_eq!(x.len(), 1);
        assert_eq!(x[0].point, Point::new(0.0, 0.0));
    }
}
