//! Convex-polygon collision detection: SAT face separation plus
//! reference-face clipping, producing up to two contact points per pair.

use arrayvec::ArrayVec;

use crate::math::{Pose2, Vec2};

use super::body::{BodyId, Polygon};

/// A single contact point between two bodies, as reported by
/// [`super::World2::detect_contacts`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact2 {
    pub body_a: BodyId,
    pub body_b: BodyId,
    /// World-space contact point.
    pub point: Vec2,
    /// Unit normal pointing from `body_a` toward `body_b`.
    pub normal: Vec2,
    /// Overlap depth in meters; slightly negative values (down to the
    /// detection slop) indicate a touching/near-touching pair.
    pub penetration_depth: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ManifoldPoint {
    /// World contact point (on the incident body's surface).
    pub point: Vec2,
    /// Signed gap along the normal; negative = penetrating.
    pub separation: f64,
    /// Contact anchor in body-a local coordinates.
    pub local_a: Vec2,
    /// Contact anchor in body-b local coordinates.
    pub local_b: Vec2,
}

/// Contact manifold between a body pair (up to two points sharing a normal).
#[derive(Debug, Clone)]
pub struct Manifold {
    pub a: usize,
    pub b: usize,
    /// World unit normal, pointing from body `a` toward body `b`.
    pub normal: Vec2,
    /// Normal in the reference body's local frame (for positional re-projection).
    pub local_normal: Vec2,
    /// Whether body `a` is the reference (face-owning) body.
    pub ref_is_a: bool,
    pub points: ArrayVec<ManifoldPoint, 2>,
}

/// Per-tick cached world-space data for one body.
#[derive(Debug, Clone)]
pub struct BodyCache {
    pub pos: Vec2,
    pub rot: crate::math::Rot2,
    pub verts: ArrayVec<Vec2, 8>,
    pub normals: ArrayVec<Vec2, 8>,
    pub aabb_lo: Vec2,
    pub aabb_hi: Vec2,
}

impl BodyCache {
    pub fn build(pose: Pose2, poly: &Polygon, margin: f64) -> Self {
        let rot = pose.rot();
        let pos = pose.pos();
        let mut verts: ArrayVec<Vec2, 8> = ArrayVec::new();
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &v in &poly.verts {
            let w = pos + rot.apply(v);
            lo.x = lo.x.min(w.x);
            lo.z = lo.z.min(w.z);
            hi.x = hi.x.max(w.x);
            hi.z = hi.z.max(w.z);
            verts.push(w);
        }
        let normals = poly.normals.iter().map(|&n| rot.apply(n)).collect();
        BodyCache {
            pos,
            rot,
            verts,
            normals,
            aabb_lo: lo - Vec2::new(margin, margin),
            aabb_hi: hi + Vec2::new(margin, margin),
        }
    }
}

/// Maximum separation of `other` over the face normals of `reference`.
/// Returns (best separation, best face index).
fn max_separation(reference: &[Vec2], ref_normals: &[Vec2], other: &[Vec2]) -> (f64, usize) {
    let n = reference.len();
    let mut best = f64::NEG_INFINITY;
    let mut best_face = 0;
    for i in 0..n {
        let v = reference[i];
        let nrm = ref_normals[i];
        let mut min_d = f64::INFINITY;
        for &p in other {
            let d = (p - v).dot(nrm);
            if d < min_d {
                min_d = d;
            }
        }
        if min_d > best {
            best = min_d;
            best_face = i;
        }
    }
    (best, best_face)
}

/// Edge of `poly` whose outward normal is most anti-parallel to `normal`.
fn incident_edge(poly: &[Vec2], poly_normals: &[Vec2], normal: Vec2) -> (Vec2, Vec2) {
    let n = poly.len();
    let mut best = f64::INFINITY;
    let mut idx = 0;
    for i in 0..n {
        let d = poly_normals[i].dot(normal);
        if d < best {
            best = d;
            idx = i;
        }
    }
    (poly[idx], poly[(idx + 1) % n])
}

/// Clip the segment (p1, p2) against the half-plane `dot(p, dir) >= offset`.
fn clip_segment(points: &mut ArrayVec<Vec2, 2>, dir: Vec2, offset: f64) {
    let mut out: ArrayVec<Vec2, 2> = ArrayVec::new();
    if points.len() < 2 {
        return;
    }
    let d1 = points[0].dot(dir) - offset;
    let d2 = points[1].dot(dir) - offset;
    if d1 >= 0.0 {
        out.push(points[0]);
    }
    if d2 >= 0.0 {
        out.push(points[1]);
    }
    if d1 * d2 < 0.0 && out.len() < 2 {
        let t = d1 / (d1 - d2);
        out.push(points[0] + (points[1] - points[0]) * t);
    }
    *points = out;
}

/// Collide two convex polygons from cached world-space data. Returns a
/// manifold when the pair is within `margin` of touching, `None` otherwise.
pub fn collide_polygons(
    idx_a: usize,
    cache_a: &BodyCache,
    idx_b: usize,
    cache_b: &BodyCache,
    margin: f64,
) -> Option<Manifold> {
    let wa = &cache_a.verts;
    let wb = &cache_b.verts;

    let (sep_a, face_a) = max_separation(wa, &cache_a.normals, wb);
    if sep_a > margin {
        return None;
    }
    let (sep_b, face_b) = max_separation(wb, &cache_b.normals, wa);
    if sep_b > margin {
        return None;
    }

    // Reference polygon owns the face with the larger separation; bias keeps
    // the choice stable between near-equal candidates.
    let ref_is_a = sep_b <= sep_a + 1e-10;
    let (ref_verts, ref_face, inc_verts, inc_cache, ref_cache) = if ref_is_a {
        (wa, face_a, wb, cache_b, cache_a)
    } else {
        (wb, face_b, wa, cache_a, cache_b)
    };

    let v1 = ref_verts[ref_face];
    let v2 = ref_verts[(ref_face + 1) % ref_verts.len()];
    let ref_n = ref_cache.normals[ref_face];
    let tangent = ref_n.perp();

    let (i1, i2) = incident_edge(inc_verts, &inc_cache.normals, ref_n);
    let mut clipped: ArrayVec<Vec2, 2> = ArrayVec::new();
    clipped.push(i1);
    clipped.push(i2);
    clip_segment(&mut clipped, tangent, v1.dot(tangent));
    clip_segment(&mut clipped, -tangent, -v2.dot(tangent));
    if clipped.is_empty() {
        return None;
    }

    let mut points: ArrayVec<ManifoldPoint, 2> = ArrayVec::new();
    for &p in &clipped {
        let separation = (p - v1).dot(ref_n);
        if separation > margin {
            continue;
        }
        let on_ref = p - ref_n * separation;
        let (pa, pb) = if ref_is_a { (on_ref, p) } else { (p, on_ref) };
        points.push(ManifoldPoint {
            point: p,
            separation,
            local_a: cache_a.rot.apply_inv(pa - cache_a.pos),
            local_b: cache_b.rot.apply_inv(pb - cache_b.pos),
        });
    }
    if points.is_empty() {
        return None;
    }

    let normal = if ref_is_a { ref_n } else { -ref_n };
    let local_normal = ref_cache.rot.apply_inv(ref_n);

    Some(Manifold { a: idx_a, b: idx_b, normal, local_normal, ref_is_a, points })
}
