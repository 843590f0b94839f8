use serde::{Deserialize, Serialize};

use super::{GeometryError, PlanarCurve, Point};

/// Segments longer than this multiple of the target are split.
pub const SPLIT_RATIO: f64 = 1.4;
/// Segments shorter than this multiple of the target are merged.
pub const MERGE_RATIO: f64 = 0.6;

/// Cumulative chord length at each node, starting at 0. For a closed curve
/// the extra final entry is the full perimeter.
pub fn arclength_positions(curve: &PlanarCurve) -> Vec<f64> {
    let mut out = Vec::with_capacity(curve.segment_count() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for l in curve.segment_lengths() {
        acc += l;
        out.push(acc);
    }
    out
}

/// Chord-parameter derivatives at every node from the non-uniform three point
/// formula. Ghost nodes: `-z_1` before an origin start, linear extrapolation
/// at other open ends.
fn derivatives(nodes: &[Point], closed: bool) -> Vec<Point> {
    let n = nodes.len();
    let origin_start = !closed && nodes[0] == Point::new(0.0, 0.0);
    (0..n)
        .map(|i| {
            let prev = if closed {
                nodes[(i + n - 1) % n]
            } else if i > 0 {
                nodes[i - 1]
            } else if origin_start {
                -nodes[1]
            } else {
                2.0 * nodes[0] - nodes[1]
            };
            let next = if closed {
                nodes[(i + 1) % n]
            } else if i + 1 < n {
                nodes[i + 1]
            } else {
                2.0 * nodes[n - 1] - nodes[n - 2]
            };
            let p = nodes[i];
            let hm = (p - prev).norm();
            let hp = (next - p).norm();
            ((next - p) * (hm * hm) + (p - prev) * (hp * hp)) / (hm * hp * (hm + hp))
        })
        .collect()
}

fn hermite(a: Point, b: Point, ma: Point, mb: Point, len: f64, u: f64) -> Point {
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    a * h00 + ma * (h10 * len) + b * h01 + mb * (h11 * len)
}

/// Point at chord-length position `s` on the cubic Hermite interpolant.
pub fn sample_at(curve: &PlanarCurve, s: f64) -> Point {
    let z = curve.nodes();
    let m = derivatives(z, curve.is_closed());
    let pos = arclength_positions(curve);
    eval(z, &m, &pos, s)
}

fn eval(z: &[Point], m: &[Point], pos: &[f64], s: f64) -> Point {
    let n = z.len();
    let segs = pos.len() - 1;
    let i = match pos.partition_point(|&p| p <= s) {
        0 => 0,
        k => (k - 1).min(segs - 1),
    };
    let len = pos[i + 1] - pos[i];
    let u = ((s - pos[i]) / len).clamp(0.0, 1.0);
    let j = (i + 1) % n;
    hermite(z[i], z[j], m[i], m[j], len, u)
}

/// Uniform redistribution along the cubic Hermite interpolant with
/// `round(L / h)` segments. Open endpoints (including an origin node) are kept
/// bit-exactly.
pub fn resample(curve: &PlanarCurve, target_spacing: f64) -> Result<PlanarCurve, GeometryError> {
    if !(target_spacing > 0.0) || !target_spacing.is_finite() {
        return Err(GeometryError::Degenerate(format!(
            "target spacing must be positive, got {target_spacing}"
        )));
    }
    let z = curve.nodes();
    let pos = arclength_positions(curve);
    let total = pos[pos.len() - 1];
    if total < 3.0 * target_spacing {
        return Err(GeometryError::Degenerate(format!(
            "curve length {total} is shorter than three target spacings"
        )));
    }
    let m = derivatives(z, curve.is_closed());
    let segs = ((total / target_spacing).round() as usize).max(3);
    let count = if curve.is_closed() { segs } else { segs + 1 };
    let mut nodes: Vec<Point> = (0..count)
        .map(|j| eval(z, &m, &pos, total * j as f64 / segs as f64))
        .collect();
    nodes[0] = z[0];
    if !curve.is_closed() {
        nodes[segs] = z[z.len() - 1];
    }
    PlanarCurve::new(nodes, curve.is_closed())
}

/// Counts from one [`remesh`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemeshStats {
    pub splits: usize,
    pub merges: usize,
}

/// Local refinement and coarsening toward `target_spacing`.
///
/// Long segments get their Hermite midpoint inserted; short segments are
/// collapsed onto their Hermite midpoint (or onto a frozen neighbour). Nodes
/// away from touched segments are left exactly where they are, which keeps
/// quantities such as loop areas free of resampling noise. On open curves the
/// first `frozen_head` and last `frozen_tail` nodes (at least one each) never
/// move. Closed curves keep at least `min_closed` nodes.
pub fn remesh(
    curve: &PlanarCurve,
    target_spacing: f64,
    frozen_head: usize,
    frozen_tail: usize,
    min_closed: usize,
) -> Result<(PlanarCurve, RemeshStats), GeometryError> {
    let closed = curve.is_closed();
    let mut nodes = curve.nodes().to_vec();
    let mut stats = RemeshStats::default();
    let (fh, ft) = if closed {
        (0, 0)
    } else {
        (frozen_head.max(1), frozen_tail.max(1))
    };
    let min_nodes = if closed { min_closed.max(3) } else { (fh + ft).max(3) };

    // merges never create short segments and splits never create ones
    // below MERGE_RATIO, so alternating the two settles quickly
    for _ in 0..16 {
        let (next, merges) = merge_pass(&nodes, closed, target_spacing, fh, ft, min_nodes);
        nodes = next;
        stats.merges += merges;
        let mut splits = 0;
        for _ in 0..16 {
            let (next, k) = split_pass(&nodes, closed, target_spacing, fh, ft);
            nodes = next;
            splits += k;
            if k == 0 {
                break;
            }
        }
        stats.splits += splits;
        if merges == 0 && splits == 0 {
            break;
        }
    }
    Ok((PlanarCurve::new(nodes, closed)?, stats))
}

fn is_frozen(i: usize, n: usize, fh: usize, ft: usize) -> bool {
    i < fh || i + ft >= n
}

fn split_pass(nodes: &[Point], closed: bool, h: f64, fh: usize, ft: usize) -> (Vec<Point>, usize) {
    let n = nodes.len();
    let m = derivatives(nodes, closed);
    let segs = if closed { n } else { n - 1 };
    let mut out = Vec::with_capacity(n + 8);
    let mut splits = 0;
    for i in 0..n {
        out.push(nodes[i]);
        if i >= segs {
            continue;
        }
        let j = (i + 1) % n;
        let len = (nodes[j] - nodes[i]).norm();
        let both_frozen = !closed && is_frozen(i, n, fh, ft) && is_frozen(j, n, fh, ft);
        if len > SPLIT_RATIO * h && !both_frozen {
            out.push(hermite(nodes[i], nodes[j], m[i], m[j], len, 0.5));
            splits += 1;
        }
    }
    (out, splits)
}

fn merge_pass(
    nodes: &[Point],
    closed: bool,
    h: f64,
    fh: usize,
    ft: usize,
    min_nodes: usize,
) -> (Vec<Point>, usize) {
    let n = nodes.len();
    let m = derivatives(nodes, closed);
    let mut out = Vec::with_capacity(n);
    let mut merges = 0;
    let short = |i: usize, j: usize| (nodes[j] - nodes[i]).norm() < MERGE_RATIO * h;
    let mid = |i: usize, j: usize| {
        let len = (nodes[j] - nodes[i]).norm();
        hermite(nodes[i], nodes[j], m[i], m[j], len, 0.5)
    };
    let mut i = 0;
    while i < n {
        let remaining = n - merges;
        if i + 1 < n && remaining > min_nodes && short(i, i + 1) {
            let fi = !closed && is_frozen(i, n, fh, ft);
            let fj = !closed && is_frozen(i + 1, n, fh, ft);
            match (fi, fj) {
                (false, false) => {
                    out.push(mid(i, i + 1));
                    merges += 1;
                    i += 2;
                }
                (true, false) => {
                    out.push(nodes[i]);
                    merges += 1;
                    i += 2;
                }
                (false, true) => {
                    merges += 1;
                    i += 1;
                }
                (true, true) => {
                    out.push(nodes[i]);
                    i += 1;
                }
            }
            continue;
        }
        out.push(nodes[i]);
        i += 1;
    }
    if closed && out.len() > min_nodes {
        let k = out.len();
        let last = out[k - 1];
        // only merge the closing segment when both its nodes are originals
        if (out[0] - last).norm() < MERGE_RATIO * h && out[0] == nodes[0] && last == nodes[n - 1] {
            out[0] = mid(n - 1, 0);
            out.pop();
            merges += 1;
        }
    }
    (out, merges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::testing::circle;
    use crate::geometry::{h_length, rotation_index};
    use std::f64::consts::TAU;

    #[test]
    fn straight_segment_is_exact() {
        let c = PlanarCurve::open(vec![
            Point::new(0.0, 0.0),
            Point::new(3.5, 0.0),
            Point::new(10.0, 0.0),
        ])
        .unwrap();
        let r = resample(&c, 1.0).unwrap();
        assert_eq!(r.len(), 11);
        for (k, p) in r.nodes().iter().enumerate() {
            assert!((p - Point::new(k as f64, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn circle_perimeter_preserved() {
        let c = circle(Point::new(0.0, 0.0), 1.0, 64);
        let r = resample(&c, TAU / 256.0).unwrap();
        assert_eq!(r.len(), 256);
        // polygon perimeter approximates the circle; compare against 2 pi
        assert!((r.length() / TAU - 1.0).abs() < 1e-3);
        assert!((rotation_index(&r) - 1.0).abs() < 1e-12);
        assert!((h_length(&r) / h_length(&circle(Point::new(0.0, 0.0), 1.0, 256)) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn idempotent_on_uniform_curves() {
        let c = circle(Point::new(0.2, 0.1), 1.3, 200);
        let h = c.length() / 200.0;
        let once = resample(&c, h).unwrap();
        let twice = resample(&once, h).unwrap();
        for (a, b) in once.nodes().iter().zip(twice.nodes()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn origin_and_ends_fixed() {
        let nodes: Vec<Point> = (0..40)
            .map(|k| {
                let s = k as f64 * 0.1;
                Point::new(s, 0.3 * s * s)
            })
            .collect();
        let c = PlanarCurve::open(nodes).unwrap();
        let r = resample(&c, 0.07).unwrap();
        assert_eq!(r.nodes()[0], c.nodes()[0]);
        assert_eq!(r.nodes()[r.len() - 1], c.nodes()[c.len() - 1]);
        let sp = r.segment_lengths();
        assert!(sp.iter().all(|l| *l > 0.5 * 0.07 && *l < 1.5 * 0.07));
    }

    #[test]
    fn too_short_is_degenerate() {
        let c = circle(Point::new(0.0, 0.0), 0.1, 16);
        assert!(matches!(resample(&c, 1.0), Err(GeometryError::Degenerate(_))));
    }

    #[test]
    fn remesh_brings_spacing_into_band() {
        let mut nodes: Vec<Point> = Vec::new();
        let mut s = 0.0;
        let mut k = 0;
        while s < 6.0 {
            nodes.push(Point::new(s, (s).sin()));
            s += if k % 3 == 0 { 0.21 } else { 0.02 };
            k += 1;
        }
        let c = PlanarCurve::open(nodes).unwrap();
        let (r, stats) = remesh(&c, 0.1, 1, 1, 12).unwrap();
        assert!(stats.splits > 0 && stats.merges > 0);
        let sp = r.segment_lengths();
        assert!(sp.iter().all(|l| *l <= SPLIT_RATIO * 0.1 + 1e-12), "{sp:?}");
        assert_eq!(r.nodes()[0], c.nodes()[0]);
        assert_eq!(r.nodes()[r.len() - 1], c.nodes()[c.len() - 1]);
    }

    #[test]
    fn remesh_keeps_closed_minimum() {
        let c = circle(Point::new(2.0, 0.0), 0.01, 64);
        let (r, _) = remesh(&c, 0.1, 0, 0, 12).unwrap();
        assert_eq!(r.len(), 12);
    }

    #[test]
    fn remesh_leaves_good_curves_alone() {
        let c = circle(Point::new(0.0, 0.0), 1.0, 100);
        let (r, stats) = remesh(&c, c.length() / 100.0, 0, 0, 12).unwrap();
        assert_eq!(stats, RemeshStats::default());
        assert_eq!(r, c);
    }
}
