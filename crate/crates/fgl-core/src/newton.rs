//! Newton polygons: the lower convex hull of `(degree, valuation)`
//! points with exact rational slopes. A segment of slope `-s` and
//! horizontal length `m` certifies `m` roots of valuation `s`, counted
//! with multiplicity, for the underlying series.
//!
//! Truncated series only expose coefficients up to their cap, so a
//! segment is *certified* only when no coefficient beyond the cap
//! (necessarily of valuation ≥ 0) could alter it; otherwise it is
//! flagged provisional.

use crate::rat::Rat;
use crate::ring::Val;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NewtonError {
    /// Fewer than two points carry a finite valuation.
    AllCoefficientsBelowPrecision,
}

impl fmt::Display for NewtonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NewtonError::AllCoefficientsBelowPrecision => {
                write!(f, "need at least two coefficients with finite valuation")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rat,
    /// Horizontal length: number of roots (with multiplicity) of
    /// valuation `-slope`.
    pub length: u64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(u64, Rat)>,
    segments: Vec<Segment>,
}

fn lower_hull(points: &[(u64, Rat)]) -> Vec<(u64, Rat)> {
    let mut hull: Vec<(u64, Rat)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it lies strictly below segment a-p:
            // (b.y - a.y)/(b.x - a.x) < (p.y - a.y)/(p.x - a.x)
            let lhs = b.1.sub(&a.1).mul(&Rat::integer((p.0 - a.0) as i64));
            let rhs = p.1.sub(&a.1).mul(&Rat::integer((b.0 - a.0) as i64));
            if lhs < rhs {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

impl NewtonPolygon {
    /// Build from `(degree, valuation)` data; `Val::AtLeast` entries
    /// (residue zero at working precision) are skipped. `cap` is the
    /// truncation degree of the originating series, if any.
    pub fn from_points(
        points: &[(u64, Val)],
        cap: Option<u64>,
    ) -> Result<NewtonPolygon, NewtonError> {
        let mut finite: Vec<(u64, Rat)> = points
            .iter()
            .filter_map(|(d, v)| v.exact().map(|e| (*d, Rat::integer(e as i64))))
            .collect();
        // on duplicate degrees only the lowest valuation can matter
        finite.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        finite.dedup_by_key(|p| p.0);
        if finite.len() < 2 {
            return Err(NewtonError::AllCoefficientsBelowPrecision);
        }
        let vertices = lower_hull(&finite);
        let segments = Self::segments_of(&vertices, &finite, cap);
        Ok(NewtonPolygon { vertices, segments })
    }

    fn segments_of(vertices: &[(u64, Rat)], finite: &[(u64, Rat)], cap: Option<u64>) -> Vec<Segment> {
        // Hypothetical worst coefficient beyond the cap: degree cap+1,
        // valuation 0. A segment survives the cap contract iff adding
        // that point leaves it intact.
        let guarded: Option<Vec<(u64, Rat)>> = cap.map(|c| {
            let mut pts = finite.to_vec();
            if pts.iter().all(|p| p.0 != c + 1) {
                pts.push((c + 1, Rat::integer(0)));
                pts.sort_by_key(|p| p.0);
            }
            lower_hull(&pts)
        });
        let mut out = Vec::new();
        for w in vertices.windows(2) {
            let (d0, v0) = w[0];
            let (d1, v1) = w[1];
            let slope = v1.sub(&v0).mul(&Rat::new(1, (d1 - d0) as i64));
            let certified = match (&guarded, cap) {
                (Some(g), Some(c)) => {
                    d1 <= c
                        && g.windows(2)
                            .any(|gw| gw[0] == (d0, v0) && gw[1] == (d1, v1))
                }
                _ => true,
            };
            out.push(Segment {
                slope,
                length: d1 - d0,
                certified,
            });
        }
        out
    }

    pub fn vertices(&self) -> &[(u64, Rat)] {
        &self.vertices
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Root valuations implied by the polygon: `(valuation, count)`
    /// pairs, steepest (largest valuation) first.
    pub fn root_valuations(&self) -> Vec<(Rat, u64)> {
        self.segments
            .iter()
            .map(|s| (s.slope.neg(), s.length))
            .collect()
    }
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "polygon[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "slope {} x{}", s.slope, s.length)?;
            if !s.certified {
                write!(f, " (provisional)")?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(data: &[(u64, u32)]) -> Vec<(u64, Val)> {
        data.iter().map(|&(d, v)| (d, Val::Exact(v))).collect()
    }

    #[test]
    fn supersingular_single_segment() {
        // [(1,1), (25,0)]: one slope -1/24 of length 24
        let p = NewtonPolygon::from_points(&pts(&[(1, 1), (25, 0)]), Some(30)).unwrap();
        assert_eq!(p.segments().len(), 1);
        assert_eq!(p.segments()[0].slope, Rat::new(-1, 24));
        assert_eq!(p.segments()[0].length, 24);
        assert!(p.segments()[0].certified);
        assert_eq!(p.root_valuations(), alloc::vec![(Rat::new(1, 24), 24)]);
    }

    #[test]
    fn two_unit_slopes() {
        let p = NewtonPolygon::from_points(&pts(&[(0, 2), (1, 1), (2, 0)]), None).unwrap();
        assert_eq!(p.segments().len(), 1);
        assert_eq!(p.segments()[0].slope, Rat::integer(-1));
        assert_eq!(p.segments()[0].length, 2);
        assert_eq!(p.root_valuations(), alloc::vec![(Rat::integer(1), 2)]);
    }

    #[test]
    fn points_above_hull_are_ignored_and_bottom_skipped() {
        let points = alloc::vec![
            (1u64, Val::Exact(1)),
            (5, Val::AtLeast(6)), // skipped
            (25, Val::Exact(0)),
            (26, Val::Exact(0)),
        ];
        let p = NewtonPolygon::from_points(&points, Some(30)).unwrap();
        let q = NewtonPolygon::from_points(&pts(&[(1, 1), (25, 0)]), Some(30)).unwrap();
        assert_eq!(p.segments()[0], q.segments()[0]);
        // extra flat segment from (25,0) to (26,0)
        assert_eq!(p.segments().len(), 2);
        assert_eq!(p.segments()[1].slope, Rat::integer(0));
    }

    #[test]
    fn insertion_above_hull_is_stable() {
        let base = pts(&[(1, 1), (25, 0)]);
        let p = NewtonPolygon::from_points(&base, Some(30)).unwrap();
        for extra in [(2u64, 5u32), (10, 1), (24, 1), (13, 3)] {
            let mut with = base.clone();
            with.push((extra.0, Val::Exact(extra.1)));
            let q = NewtonPolygon::from_points(&with, Some(30)).unwrap();
            assert_eq!(p, q, "inserting {extra:?} above the hull changed it");
        }
    }

    #[test]
    fn slopes_strictly_increase() {
        let p =
            NewtonPolygon::from_points(&pts(&[(0, 6), (1, 2), (3, 1), (7, 0), (9, 0)]), None)
                .unwrap();
        let slopes: Vec<Rat> = p.segments().iter().map(|s| s.slope).collect();
        for w in slopes.windows(2) {
            assert!(w[0] < w[1]);
        }
        let total: u64 = p.segments().iter().map(|s| s.length).sum();
        assert_eq!(total, 9 - 0);
    }

    #[test]
    fn provisional_flag_near_cap() {
        // hull ends at (4,0); a degree-6 coefficient of valuation 0
        // could rewrite the last segment, so with cap 5 the final
        // segment to (4,0) is certified but a segment ending at 6 is not
        let p = NewtonPolygon::from_points(&pts(&[(1, 3), (4, 0), (6, 0)]), Some(5)).unwrap();
        assert!(p.segments()[0].certified);
        assert!(!p.segments()[1].certified, "{p}");
        // a steep segment that a cap+1 coefficient would undercut:
        // (0,0)-(3,2) is above the hypothetical chord to (cap+1, 0)
        let q = NewtonPolygon::from_points(&pts(&[(0, 4), (3, 6)]), Some(3)).unwrap();
        assert!(!q.segments()[0].certified);
    }

    #[test]
    fn too_few_finite_points() {
        let points = alloc::vec![(1u64, Val::AtLeast(6)), (2, Val::Exact(1))];
        assert_eq!(
            NewtonPolygon::from_points(&points, None),
            Err(NewtonError::AllCoefficientsBelowPrecision)
        );
    }
}
