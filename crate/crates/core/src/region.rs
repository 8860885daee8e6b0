//! Downward-closed convex rate regions.
//!
//! Every region in this crate is the convex hull of a union of rectangles
//! `[0, cr] × [0, sr]` anchored at the origin (time sharing between
//! operating points). Such a region is fully described by its upper-right
//! boundary, which runs from `(cr_max, 0)` counter-clockwise to
//! `(0, sr_max)`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, RatePair, Result};

/// Collinearity tolerance for hull construction, relative to the bounding-box diagonal.
const COLLINEAR_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RateRegion {
    vertices: Vec<RatePair>,
    anchors: Vec<RatePair>,
}

#[inline]
fn cross(o: RatePair, a: RatePair, b: RatePair) -> f64 {
    (a.cr - o.cr) * (b.sr - o.sr) - (a.sr - o.sr) * (b.cr - o.cr)
}

/// Convex hull of `{(0,0)} ∪ ⋃ [0,c]×[0,s]` over the given corners.
///
/// The input corners are kept as the region's anchors (in input order) so
/// that regions built from matched anchor sets can be averaged.
pub fn hull_of_rectangles(corners: &[RatePair]) -> Result<RateRegion> {
    if corners.is_empty() {
        return Err(Error::Empty("rate-region corners"));
    }
    for c in corners {
        if !c.cr.is_finite() || !c.sr.is_finite() {
            return Err(Error::NonFinite("rate-region corner"));
        }
        if c.cr < 0.0 || c.sr < 0.0 {
            return Err(Error::OutOfRange { name: "rate-region corner", value: c.cr.min(c.sr) });
        }
    }
    let cr_max = corners.iter().fold(0.0f64, |m, c| m.max(c.cr));
    let sr_max = corners.iter().fold(0.0f64, |m, c| m.max(c.sr));
    let tol = COLLINEAR_REL_TOL * (cr_max * cr_max + sr_max * sr_max).sqrt();

    let mut pts: Vec<RatePair> = corners.to_vec();
    pts.push(RatePair::new(cr_max, 0.0));
    pts.push(RatePair::new(0.0, sr_max));
    // Walk by decreasing CR; within a column, upward.
    pts.sort_by(|a, b| {
        b.cr.partial_cmp(&a.cr).unwrap_or(Ordering::Equal).then(a.sr.partial_cmp(&b.sr).unwrap_or(Ordering::Equal))
    });
    pts.dedup();

    let mut chain: Vec<RatePair> = Vec::with_capacity(pts.len());
    for p in pts {
        // drop the middle point when it lies within `tol` of the chord
        while chain.len() >= 2 && {
            let o = chain[chain.len() - 2];
            let chord = ((p.cr - o.cr).powi(2) + (p.sr - o.sr).powi(2)).sqrt();
            cross(o, chain[chain.len() - 1], p) <= tol * chord
        } {
            chain.pop();
        }
        chain.push(p);
    }
    Ok(RateRegion { vertices: chain, anchors: corners.to_vec() })
}

impl RateRegion {
    /// Boundary vertices from `(cr_max, 0)` to `(0, sr_max)`.
    pub fn vertices(&self) -> &[RatePair] {
        &self.vertices
    }

    /// Corners the region was built from, in construction order.
    pub fn anchors(&self) -> &[RatePair] {
        &self.anchors
    }

    pub fn cr_max(&self) -> f64 {
        self.vertices[0].cr
    }

    pub fn sr_max(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].sr
    }

    /// Whether `p` lies in the region up to a slack of `tol` (rate units).
    pub fn contains(&self, p: RatePair, tol: f64) -> bool {
        contains(self, p, tol)
    }

    /// Largest CR achievable together with the sensing rate `sr`, or `None`
    /// above `sr_max`.
    pub fn cr_at_sr(&self, sr: f64) -> Option<f64> {
        if sr > self.sr_max() {
            return None;
        }
        if sr <= 0.0 {
            return Some(self.cr_max());
        }
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            if sr >= a.sr && sr <= b.sr {
                if b.sr == a.sr {
                    return Some(a.cr.max(b.cr));
                }
                let f = (sr - a.sr) / (b.sr - a.sr);
                return Some(a.cr + f * (b.cr - a.cr));
            }
        }
        Some(self.vertices[self.vertices.len() - 1].cr)
    }

    /// Checks the boundary invariants: monotone staircase in convex position.
    pub fn is_valid(&self) -> bool {
        let v = &self.vertices;
        if v.is_empty() || v[0].sr != 0.0 || v[v.len() - 1].cr != 0.0 {
            return false;
        }
        let monotone = v.windows(2).all(|w| w[1].cr <= w[0].cr && w[1].sr >= w[0].sr && w[1] != w[0]);
        let convex = v.windows(3).all(|w| cross(w[0], w[1], w[2]) > 0.0);
        monotone && convex
    }
}

pub fn contains(region: &RateRegion, p: RatePair, tol: f64) -> bool {
    let p = RatePair::new(p.cr.max(0.0), p.sr.max(0.0));
    if p.cr > region.cr_max() + tol || p.sr > region.sr_max() + tol {
        return false;
    }
    region.vertices.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        let len = ((b.cr - a.cr).powi(2) + (b.sr - a.sr).powi(2)).sqrt();
        // signed distance of p to the left of a→b
        cross(a, b, p) >= -tol * len
    })
}

/// Whether every boundary vertex of `a` lies in `b`.
pub fn region_subset(a: &RateRegion, b: &RateRegion, tol: f64) -> bool {
    a.vertices.iter().all(|&v| contains(b, v, tol))
}

/// Averages matched anchors across regions and hulls the mean corners.
///
/// Anchor `k` of every region is assumed to describe the same operating
/// point (for instance the same rate-profile parameter).
pub fn average_regions(regions: &[RateRegion], alpha_anchor_count: usize) -> Result<RateRegion> {
    if regions.is_empty() {
        return Err(Error::Empty("regions to average"));
    }
    if alpha_anchor_count == 0 {
        return Err(Error::Empty("anchor set"));
    }
    for r in regions {
        if r.anchors.len() != alpha_anchor_count {
            return Err(Error::AnchorMismatch { expected: alpha_anchor_count, got: r.anchors.len() });
        }
    }
    let n = regions.len() as f64;
    let mean: Vec<RatePair> = (0..alpha_anchor_count)
        .map(|k| {
            let (cr, sr) = regions.iter().fold((0.0, 0.0), |(c, s), r| (c + r.anchors[k].cr, s + r.anchors[k].sr));
            RatePair::new(cr / n, sr / n)
        })
        .collect();
    hull_of_rectangles(&mean)
}
