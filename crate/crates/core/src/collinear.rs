//! Staircase certificates for collinear instances: when every edge of
//! an Eulerian multigraph lies on one line, *every* Euler tour is
//! weakly simple, and the perturbation can be written down directly.
//!
//! The i-th vertex occurrence of the tour is lifted to height
//! `i*eps/(2n)` above the carrier line (n = tour length), which makes
//! the perturbed path strictly monotone across the line; the closing
//! edge returns through one bend point placed left of and above the
//! leftmost vertex, outside the strip the staircase occupies.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::certify::{BendPoint, PerturbationCertificate};
use crate::geom::{orientation, pow2_scale, rat_int, rational_sqrt, Orientation, Point, Rational};
use crate::graph::{
    choose_epsilon, validate_tour, SegmentGraph, Tour, TourError, VertexId,
};
use crate::tour::euler_tour;

/// Errors from the collinear construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CollinearError {
    /// Some edge leaves the carrier line of the first edge.
    NotCollinear,
    /// The graph admits no Euler tour.
    NotEulerian,
    /// `eps` is not in `(0, choose_epsilon(g)]`.
    BadEpsilon,
    /// The supplied tour is not an Euler tour of the graph.
    InvalidTour(TourError),
}

impl fmt::Display for CollinearError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollinearError::NotCollinear => write!(f, "edges do not lie on one line"),
            CollinearError::NotEulerian => write!(f, "graph is not Eulerian"),
            CollinearError::BadEpsilon => write!(f, "epsilon is out of range"),
            CollinearError::InvalidTour(e) => write!(f, "invalid tour: {e}"),
        }
    }
}

impl std::error::Error for CollinearError {}

/// Canonical direction of the common carrier line, or `None` when the
/// edges are not all collinear. The direction is normalized in sign so
/// that it is lexicographically positive.
pub fn carrier_direction(g: &SegmentGraph) -> Option<(Rational, Rational)> {
    let first = g.segment(g.edges.first()?);
    for p in &g.vertices {
        if orientation(&first.a, &first.b, p) != Orientation::Collinear {
            return None;
        }
    }
    let mut d = (&first.b.x - &first.a.x, &first.b.y - &first.a.y);
    if d.0.is_negative() || (d.0.is_zero() && d.1.is_negative()) {
        d = (-d.0, -d.1);
    }
    Some(d)
}

/// Builds the staircase certificate for a given Euler tour of an
/// all-collinear Eulerian multigraph.
///
/// The certificate's tour is the input tour rotated to start at the
/// leftmost vertex (the same closed walk). `eps` must satisfy
/// `0 < eps <= choose_epsilon(g)`.
pub fn collinear_certificate_for_tour(
    g: &SegmentGraph,
    tour: &Tour,
    eps: &Rational,
) -> Result<PerturbationCertificate, CollinearError> {
    let d = carrier_direction(g).ok_or(CollinearError::NotCollinear)?;
    let allowed = choose_epsilon(g).expect("graph has at least two vertices");
    if !eps.is_positive() || *eps > allowed {
        return Err(CollinearError::BadEpsilon);
    }
    validate_tour(g, tour).map_err(CollinearError::InvalidTour)?;
    let m = tour.len();
    // Rotate the tour to start at the leftmost vertex (minimal
    // projection onto the carrier; unique since the points are
    // distinct and collinear).
    let proj = |v: VertexId| -> Rational {
        let p = g.point(v);
        &d.0 * &p.x + &d.1 * &p.y
    };
    let start = (0..m)
        .min_by(|&i, &j| proj(tour.vertices[i]).cmp(&proj(tour.vertices[j])))
        .expect("tour is nonempty");
    let mut vertices = Vec::with_capacity(m);
    vertices.extend_from_slice(&tour.vertices[start..]);
    vertices.extend_from_slice(&tour.vertices[..start]);
    let tour = Tour::new(vertices);
    let p0 = g.point(tour.vertices[0]).clone();

    let len2 = &d.0 * &d.0 + &d.1 * &d.1;
    let half_eps = eps / rat_int(2);
    let normal = (-&d.1, d.0.clone());
    // Tangent/normal displacements: with a rational carrier length the
    // heights are exactly i*eps/(2m) and the bend sits at
    // (-eps/2, eps/2) relative to p0 in the rotated frame; otherwise
    // scale the unnormalized direction by powers of two so that all
    // displacements stay strictly below eps/2.
    let (alpha, beta, gamma) = match rational_sqrt(&len2) {
        Some(len) => {
            let alpha = eps / (rat_int(2 * m as i64) * &len);
            let beta = &half_eps / &len;
            let gamma = &half_eps / &len;
            (alpha, beta, gamma)
        }
        None => {
            let alpha = pow2_scale(
                &(&len2 * rat_int((m * m) as i64)),
                &(&half_eps * &half_eps),
            );
            let beta = pow2_scale(&len2, &(&half_eps * &half_eps));
            let gamma = &alpha * rat_int(m as i64);
            (alpha, beta, gamma)
        }
    };
    let perturbed: Vec<Point> = tour
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let p = g.point(v);
            let h = &alpha * rat_int(i as i64);
            Point::new(&p.x + &normal.0 * &h, &p.y + &normal.1 * &h)
        })
        .collect();
    let q = Point::new(
        &p0.x - &d.0 * &beta + &normal.0 * &gamma,
        &p0.y - &d.1 * &beta + &normal.1 * &gamma,
    );
    Ok(PerturbationCertificate {
        tour,
        eps: eps.clone(),
        perturbed,
        bends: vec![BendPoint { after: m - 1, point: q }],
    })
}

/// Chooses an Euler tour and certifies it. See
/// [`collinear_certificate_for_tour`].
pub fn collinear_tour_certificate(
    g: &SegmentGraph,
    eps: &Rational,
) -> Result<(Tour, PerturbationCertificate), CollinearError> {
    if carrier_direction(g).is_none() {
        return Err(CollinearError::NotCollinear);
    }
    let tour = euler_tour(g).ok_or(CollinearError::NotEulerian)?;
    let cert = collinear_certificate_for_tour(g, &tour, eps)?;
    Ok((cert.tour.clone(), cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::verify_certificate;
    use crate::geom::{rat, Segment};
    use crate::graph::{build_graph, SegmentMultiset};
    use crate::tour::euler_tour_with;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(x1: i64, y1: i64, x2: i64, y2: i64) -> Segment {
        Segment::new(pt(x1, y1), pt(x2, y2))
    }

    #[test]
    fn doubled_edge_heights() {
        let g = build_graph(&SegmentMultiset::new(false, vec![(seg(0, 0, 1, 0), 2)])).unwrap();
        let eps = choose_epsilon(&g).unwrap();
        assert_eq!(eps, rat(1, 16));
        let (tour, cert) = collinear_tour_certificate(&g, &eps).unwrap();
        assert_eq!(tour.len(), 2);
        // Heights 0 and eps/4; bend at (-eps/2, eps/2).
        assert_eq!(cert.perturbed[0], pt(0, 0));
        assert_eq!(
            cert.perturbed[1],
            Point::new(rat_int(1), rat(1, 64))
        );
        assert_eq!(cert.bends.len(), 1);
        assert_eq!(cert.bends[0].after, 1);
        assert_eq!(cert.bends[0].point, Point::new(rat(-1, 32), rat(1, 32)));
        assert_eq!(verify_certificate(&g, &cert), Ok(()));
    }

    #[test]
    fn doubled_path_heights() {
        let g = build_graph(&SegmentMultiset::new(
            false,
            vec![(seg(0, 0, 1, 0), 2), (seg(1, 0, 2, 0), 2)],
        ))
        .unwrap();
        let eps = choose_epsilon(&g).unwrap();
        let (tour, cert) = collinear_tour_certificate(&g, &eps).unwrap();
        assert_eq!(tour.len(), 4);
        for (i, p) in cert.perturbed.iter().enumerate() {
            assert_eq!(p.y, rat_int(i as i64) * &eps / rat_int(8));
        }
        assert_eq!(verify_certificate(&g, &cert), Ok(()));
    }

    #[test]
    fn overlapping_edges_staircase() {
        // Overlaps and junction vertices on one line: the subdivision
        // route would reject this, the staircase does not care.
        let g = build_graph(&SegmentMultiset::new(
            false,
            vec![
                (seg(0, 0, 2, 0), 1),
                (seg(1, 0, 3, 0), 1),
                (seg(0, 0, 1, 0), 1),
                (seg(2, 0, 3, 0), 1),
            ],
        ))
        .unwrap();
        let eps = choose_epsilon(&g).unwrap();
        let (tour, cert) = collinear_tour_certificate(&g, &eps).unwrap();
        assert_eq!(tour.len(), 4);
        // Strictly monotone heights off the carrier.
        for w in cert.perturbed.windows(2) {
            assert!(w[0].y < w[1].y);
        }
        assert_eq!(verify_certificate(&g, &cert), Ok(()));
    }

    #[test]
    fn irrational_carrier_uses_scaled_normal() {
        let g = build_graph(&SegmentMultiset::new(false, vec![(seg(0, 0, 1, 1), 2)])).unwrap();
        let eps = choose_epsilon(&g).unwrap();
        assert_eq!(eps, rat(1, 8));
        let (_, cert) = collinear_tour_certificate(&g, &eps).unwrap();
        // alpha = 1/64 against the unnormalized normal (-1, 1).
        assert_eq!(
            cert.perturbed[1],
            Point::new(rat(63, 64), rat(65, 64))
        );
        assert_eq!(verify_certificate(&g, &cert), Ok(()));
    }

    #[test]
    fn rejects_bad_inputs() {
        let square = build_graph(&SegmentMultiset::new(
            false,
            vec![
                (seg(0, 0, 1, 0), 1),
                (seg(1, 0, 1, 1), 1),
                (seg(1, 1, 0, 1), 1),
                (seg(0, 1, 0, 0), 1),
            ],
        ))
        .unwrap();
        let eps = rat(1, 16);
        assert_eq!(
            collinear_tour_certificate(&square, &eps),
            Err(CollinearError::NotCollinear)
        );
        let path = build_graph(&SegmentMultiset::new(false, vec![(seg(0, 0, 1, 0), 1)])).unwrap();
        assert_eq!(
            collinear_tour_certificate(&path, &eps),
            Err(CollinearError::NotEulerian)
        );
        let doubled = build_graph(&SegmentMultiset::new(false, vec![(seg(0, 0, 1, 0), 2)])).unwrap();
        assert_eq!(
            collinear_tour_certificate(&doubled, &rat_int(1)),
            Err(CollinearError::BadEpsilon)
        );
        assert_eq!(
            collinear_tour_certificate(&doubled, &rat_int(0)),
            Err(CollinearError::BadEpsilon)
        );
    }

    #[test]
    fn every_sampled_tour_certifies() {
        // Messy collinear multigraph: overlaps, multiplicities, and a
        // through vertex; several random Euler tours, all certified.
        let g = build_graph(&SegmentMultiset::new(
            false,
            vec![
                (seg(0, 0, 4, 0), 2),
                (seg(1, 0, 2, 0), 2),
                (seg(2, 0, 4, 0), 2),
                (seg(0, 0, 1, 0), 2),
            ],
        ))
        .unwrap();
        let eps = choose_epsilon(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for _ in 0..25 {
            let tour = euler_tour_with(&g, |c| c[rng.gen_range(0..c.len())]).unwrap();
            let cert = collinear_certificate_for_tour(&g, &tour, &eps).unwrap();
            assert_eq!(verify_certificate(&g, &cert), Ok(()));
        }
    }

    #[test]
    fn directed_collinear() {
        // Directed doubled edge, one copy each way.
        let g = build_graph(&SegmentMultiset::new(
            true,
            vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 0, 0), 1)],
        ))
        .unwrap();
        let eps = choose_epsilon(&g).unwrap();
        let (tour, cert) = collinear_tour_certificate(&g, &eps).unwrap();
        assert_eq!(validate_tour(&g, &tour), Ok(()));
        assert_eq!(verify_certificate(&g, &cert), Ok(()));
    }
}
