//! Perturbation certificates and their independent verifier.
//!
//! A multiset has a weakly simple Euler tour when for every positive
//! threshold the tour's vertex occurrences can be displaced by less than
//! that threshold into a genuinely simple closed polygon. A
//! [`PerturbationCertificate`] witnesses this: it fixes a scale `eps`
//! no larger than the graph's structural threshold (see
//! [`crate::graph::choose_epsilon`]), one perturbed point per tour
//! occurrence, and optional bend points that let a single tour edge map
//! to a short polyline instead of one segment. Below the structural
//! threshold, shrinking the certificate scales linearly, so one valid
//! certificate settles the "for every threshold" quantifier.
//!
//! [`verify_certificate`] re-derives everything from scratch (exact
//! arithmetic, no data shared with the construction side) and is the
//! acceptance oracle for the whole crate.

use std::fmt;

use num_traits::Signed;

use crate::geom::{
    classify_pair, orientation, point_segment_distance2, squared_distance, Orientation, PairClass,
    Point, Rational, Segment,
};
use crate::graph::{choose_epsilon, validate_tour, SegmentGraph, Tour, TourError};

/// Error for polygon predicates on degenerate vertex lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooFewVertices {
    pub got: usize,
}

impl fmt::Display for TooFewVertices {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a polygon needs at least 3 vertices, got {}", self.got)
    }
}

impl std::error::Error for TooFewVertices {}

/// Exact simplicity test for a closed polygon.
///
/// The polygon is simple when consecutive edges meet exactly in their
/// shared vertex and all other edge pairs are disjoint. Consecutive
/// collinear vertices (straight angles) are allowed; repeated vertices
/// and zero-length edges are not.
pub fn is_simple_polygon(pts: &[Point]) -> Result<bool, TooFewVertices> {
    let n = pts.len();
    if n < 3 {
        return Err(TooFewVertices { got: n });
    }
    for i in 0..n {
        if pts[i] == pts[(i + 1) % n] {
            return Ok(false);
        }
    }
    let edges: Vec<Segment> = (0..n)
        .map(|i| Segment::new(pts[i].clone(), pts[(i + 1) % n].clone()))
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let class = classify_pair(&edges[i], &edges[j]);
            let ok = if adjacent {
                class == PairClass::SharedEndpoint
            } else {
                class == PairClass::Disjoint
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Independent reimplementation of the simplicity test, used only to
/// cross-check [`is_simple_polygon`]. It avoids the shared pair
/// classifier entirely: intersections are detected with raw orientation
/// and box tests.
pub fn is_simple_polygon_naive(pts: &[Point]) -> Result<bool, TooFewVertices> {
    let n = pts.len();
    if n < 3 {
        return Err(TooFewVertices { got: n });
    }
    for i in 0..n {
        for j in i + 1..n {
            if pts[i] == pts[j] {
                return Ok(false);
            }
        }
    }
    let on_seg = |p: &Point, a: &Point, b: &Point| -> bool {
        orientation(a, b, p) == Orientation::Collinear
            && p.x >= a.x.clone().min(b.x.clone())
            && p.x <= a.x.clone().max(b.x.clone())
            && p.y >= a.y.clone().min(b.y.clone())
            && p.y <= a.y.clone().max(b.y.clone())
    };
    let meet = |a: &Point, b: &Point, c: &Point, d: &Point| -> bool {
        let o1 = orientation(a, b, c);
        let o2 = orientation(a, b, d);
        let o3 = orientation(c, d, a);
        let o4 = orientation(c, d, b);
        if o1 != o2
            && o3 != o4
            && o1 != Orientation::Collinear
            && o2 != Orientation::Collinear
            && o3 != Orientation::Collinear
            && o4 != Orientation::Collinear
        {
            return true;
        }
        on_seg(c, a, b) || on_seg(d, a, b) || on_seg(a, c, d) || on_seg(b, c, d)
    };
    for i in 0..n {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (&pts[j], &pts[(j + 1) % n]);
            if j == i + 1 {
                // Shared vertex b == c; anything beyond that is a fault.
                if meet(a, b, c, d) && !(on_seg(c, a, b) && !on_seg(d, a, b) && !on_seg(a, c, d)) {
                    return Ok(false);
                }
            } else if i == 0 && j == n - 1 {
                // Shared vertex d == a.
                if meet(a, b, c, d) && !(on_seg(d, a, b) && !on_seg(c, a, b) && !on_seg(b, c, d)) {
                    return Ok(false);
                }
            } else if meet(a, b, c, d) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An extra polygon vertex inserted after tour occurrence `after`,
/// turning the image of that tour edge into a polyline. The bend must
/// stay within the certificate scale of the original edge's segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BendPoint {
    pub after: usize,
    pub point: Point,
}

/// Witness that a tour is weakly simple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationCertificate {
    pub tour: Tour,
    pub eps: Rational,
    /// One perturbed point per tour occurrence, in tour order.
    pub perturbed: Vec<Point>,
    /// Bend points; several bends with the same `after` keep their list
    /// order along the polyline.
    pub bends: Vec<BendPoint>,
}

impl PerturbationCertificate {
    /// The closed polygon encoded by the certificate: perturbed
    /// occurrence points interleaved with bends.
    pub fn polygon(&self) -> Vec<Point> {
        let m = self.perturbed.len();
        let mut out = Vec::with_capacity(m + self.bends.len());
        for i in 0..m {
            out.push(self.perturbed[i].clone());
            for b in &self.bends {
                if b.after == i {
                    out.push(b.point.clone());
                }
            }
        }
        out
    }
}

/// Reasons a certificate fails verification, with the offending index
/// where applicable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertFailure {
    /// The tour itself is not an Euler tour of the graph.
    BadTour(TourError),
    /// `eps` is not positive.
    NonPositiveEpsilon,
    /// `eps` exceeds the structural threshold of the graph.
    EpsilonTooLarge { allowed: Rational },
    /// Number of perturbed points differs from the tour length.
    LengthMismatch { expected: usize, got: usize },
    /// Occurrence `index` moved by at least `eps`.
    Displacement { index: usize },
    /// Bend `index` names a tour position that does not exist.
    BendRange { index: usize },
    /// Bend `index` lies at distance `eps` or more from its tour edge.
    BendDisplacement { index: usize },
    /// The encoded polygon is not simple (or degenerate).
    NotSimple,
}

impl fmt::Display for CertFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertFailure::BadTour(e) => write!(f, "invalid tour: {e}"),
            CertFailure::NonPositiveEpsilon => write!(f, "certificate scale is not positive"),
            CertFailure::EpsilonTooLarge { allowed } => write!(
                f,
                "certificate scale exceeds the graph threshold {}",
                allowed
            ),
            CertFailure::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} perturbed points, got {got}")
            }
            CertFailure::Displacement { index } => {
                write!(f, "occurrence {index} is displaced by eps or more")
            }
            CertFailure::BendRange { index } => {
                write!(f, "bend {index} names a tour position out of range")
            }
            CertFailure::BendDisplacement { index } => {
                write!(f, "bend {index} strays eps or more from its tour edge")
            }
            CertFailure::NotSimple => write!(f, "perturbed polygon is not simple"),
        }
    }
}

impl std::error::Error for CertFailure {}

/// Verifies a certificate against its graph from first principles.
///
/// Checks, in order: the tour is an Euler tour of `g`; the scale is
/// positive and at most the graph's structural threshold; every
/// occurrence moved strictly less than `eps`; every bend is attached to
/// a real tour position and lies strictly within `eps` of that tour
/// edge's original segment; and the resulting closed polygon is simple.
pub fn verify_certificate(
    g: &SegmentGraph,
    cert: &PerturbationCertificate,
) -> Result<(), CertFailure> {
    validate_tour(g, &cert.tour).map_err(CertFailure::BadTour)?;
    if !cert.eps.is_positive() {
        return Err(CertFailure::NonPositiveEpsilon);
    }
    let allowed = choose_epsilon(g).expect("graph built from segments has distinct vertices");
    if cert.eps > allowed {
        return Err(CertFailure::EpsilonTooLarge { allowed });
    }
    let m = cert.tour.len();
    if cert.perturbed.len() != m {
        return Err(CertFailure::LengthMismatch {
            expected: m,
            got: cert.perturbed.len(),
        });
    }
    let eps2 = &cert.eps * &cert.eps;
    for (i, p) in cert.perturbed.iter().enumerate() {
        let original = g.point(cert.tour.vertices[i]);
        if squared_distance(original, p) >= eps2 {
            return Err(CertFailure::Displacement { index: i });
        }
    }
    for (i, bend) in cert.bends.iter().enumerate() {
        if bend.after >= m {
            return Err(CertFailure::BendRange { index: i });
        }
        let (a, b) = cert.tour.step(bend.after);
        let seg = Segment::new(g.point(a).clone(), g.point(b).clone());
        if point_segment_distance2(&bend.point, &seg) >= eps2 {
            return Err(CertFailure::BendDisplacement { index: i });
        }
    }
    match is_simple_polygon(&cert.polygon()) {
        Ok(true) => Ok(()),
        _ => Err(CertFailure::NotSimple),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_int};
    use crate::graph::{build_graph, SegmentMultiset, VertexId};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn ptq(x: Rational, y: Rational) -> Point {
        Point::new(x, y)
    }

    fn seg(x1: i64, y1: i64, x2: i64, y2: i64) -> Segment {
        Segment::new(pt(x1, y1), pt(x2, y2))
    }

    #[test]
    fn simplicity_basic_shapes() {
        let triangle = vec![pt(0, 0), pt(4, 0), pt(0, 3)];
        assert_eq!(is_simple_polygon(&triangle), Ok(true));
        let bowtie = vec![pt(0, 0), pt(2, 2), pt(2, 0), pt(0, 2)];
        assert_eq!(is_simple_polygon(&bowtie), Ok(false));
        // Straight angles are fine.
        let straight = vec![pt(0, 0), pt(1, 0), pt(2, 0), pt(2, 2), pt(0, 2)];
        assert_eq!(is_simple_polygon(&straight), Ok(true));
        // Repeated vertex.
        let pinched = vec![pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 0), pt(-2, 2), pt(-2, 0)];
        assert_eq!(is_simple_polygon(&pinched), Ok(false));
        // Zero-length edge.
        let stutter = vec![pt(0, 0), pt(2, 0), pt(2, 0), pt(1, 2)];
        assert_eq!(is_simple_polygon(&stutter), Ok(false));
        // Fold-back overlap between adjacent edges.
        let spike = vec![pt(0, 0), pt(4, 0), pt(2, 0), pt(2, 2)];
        assert_eq!(is_simple_polygon(&spike), Ok(false));
        assert_eq!(is_simple_polygon(&[pt(0, 0), pt(1, 0)]), Err(TooFewVertices { got: 2 }));
    }

    #[test]
    fn naive_oracle_agrees_on_fixed_shapes() {
        let shapes: Vec<Vec<Point>> = vec![
            vec![pt(0, 0), pt(4, 0), pt(0, 3)],
            vec![pt(0, 0), pt(2, 2), pt(2, 0), pt(0, 2)],
            vec![pt(0, 0), pt(1, 0), pt(2, 0), pt(2, 2), pt(0, 2)],
            vec![pt(0, 0), pt(2, 0), pt(2, 2), pt(0, 0), pt(-2, 2), pt(-2, 0)],
            vec![pt(0, 0), pt(4, 0), pt(2, 0), pt(2, 2)],
            vec![pt(0, 0), pt(4, 0), pt(4, 4), pt(2, 0), pt(0, 4)],
        ];
        for s in shapes {
            assert_eq!(is_simple_polygon(&s), is_simple_polygon_naive(&s), "{s:?}");
        }
    }

    #[test]
    fn naive_oracle_agrees_on_random_walks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0002);
        for _ in 0..300 {
            let n = rng.gen_range(3..9);
            let pts: Vec<Point> = (0..n)
                .map(|_| pt(rng.gen_range(-3i64..4), rng.gen_range(-3i64..4)))
                .collect();
            assert_eq!(
                is_simple_polygon(&pts),
                is_simple_polygon_naive(&pts),
                "{pts:?}"
            );
        }
    }

    fn square_graph() -> SegmentGraph {
        build_graph(&SegmentMultiset::new(
            false,
            vec![
                (seg(0, 0, 1, 0), 1),
                (seg(1, 0, 1, 1), 1),
                (seg(1, 1, 0, 1), 1),
                (seg(0, 1, 0, 0), 1),
            ],
        ))
        .unwrap()
    }

    fn square_cert() -> PerturbationCertificate {
        // Vertex ids in lexicographic order: 0=(0,0) 1=(0,1) 2=(1,0) 3=(1,1).
        let tour = Tour::new(vec![VertexId(0), VertexId(2), VertexId(3), VertexId(1)]);
        PerturbationCertificate {
            tour,
            eps: rat(1, 16),
            perturbed: vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)],
            bends: vec![],
        }
    }

    #[test]
    fn verifier_accepts_identity_perturbation() {
        let g = square_graph();
        assert_eq!(verify_certificate(&g, &square_cert()), Ok(()));
    }

    #[test]
    fn verifier_rejects_each_failure_mode() {
        let g = square_graph();

        let mut cert = square_cert();
        cert.eps = rat(1, 8);
        assert_eq!(
            verify_certificate(&g, &cert),
            Err(CertFailure::EpsilonTooLarge { allowed: rat(1, 16) })
        );

        let mut cert = square_cert();
        cert.eps = rat_int(0);
        assert_eq!(verify_certificate(&g, &cert), Err(CertFailure::NonPositiveEpsilon));

        let mut cert = square_cert();
        cert.perturbed[2] = ptq(rat_int(1), rat_int(1) + rat(1, 16));
        assert_eq!(
            verify_certificate(&g, &cert),
            Err(CertFailure::Displacement { index: 2 })
        );

        let mut cert = square_cert();
        cert.perturbed.pop();
        assert_eq!(
            verify_certificate(&g, &cert),
            Err(CertFailure::LengthMismatch { expected: 4, got: 3 })
        );

        let mut cert = square_cert();
        cert.tour.vertices[1] = VertexId(3);
        assert!(matches!(
            verify_certificate(&g, &cert),
            Err(CertFailure::BadTour(_))
        ));

        // A bend on the bottom edge, but hovering too far from it.
        let mut cert = square_cert();
        cert.bends.push(BendPoint {
            after: 0,
            point: ptq(rat(1, 2), rat(1, 16)),
        });
        assert_eq!(
            verify_certificate(&g, &cert),
            Err(CertFailure::BendDisplacement { index: 0 })
        );

        let mut cert = square_cert();
        cert.bends.push(BendPoint {
            after: 9,
            point: pt(0, 0),
        });
        assert_eq!(
            verify_certificate(&g, &cert),
            Err(CertFailure::BendRange { index: 0 })
        );

        // A legal bend keeps the certificate valid.
        let mut cert = square_cert();
        cert.bends.push(BendPoint {
            after: 0,
            point: ptq(rat(1, 2), rat(1, 32)),
        });
        assert_eq!(verify_certificate(&g, &cert), Ok(()));
    }

    #[test]
    fn verifier_rejects_degenerate_polygons() {
        // A doubled edge: the tour has two occurrences, so without a
        // bend the "polygon" has only two vertices.
        let g = build_graph(&SegmentMultiset::new(false, vec![(seg(0, 0, 1, 0), 2)])).unwrap();
        let tour = Tour::new(vec![VertexId(0), VertexId(1)]);
        let flat = PerturbationCertificate {
            tour: tour.clone(),
            eps: rat(1, 16),
            perturbed: vec![pt(0, 0), pt(1, 0)],
            bends: vec![],
        };
        assert_eq!(verify_certificate(&g, &flat), Err(CertFailure::NotSimple));

        // A bend placed on the segment itself keeps the polygon flat:
        // the closing edge overlaps both others.
        let mut collinear_bend = flat.clone();
        collinear_bend.bends.push(BendPoint {
            after: 0,
            point: ptq(rat(1, 2), rat_int(0)),
        });
        assert_eq!(
            verify_certificate(&g, &collinear_bend),
            Err(CertFailure::NotSimple)
        );

        // Lifting the bend off the line makes a genuine triangle.
        let mut lifted = flat;
        lifted.bends.push(BendPoint {
            after: 0,
            point: ptq(rat(1, 2), rat(1, 32)),
        });
        assert_eq!(verify_certificate(&g, &lifted), Ok(()));
    }
}
