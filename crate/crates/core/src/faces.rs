//! Planar subdivisions of simple geometric graphs: half-edge structure,
//! face extraction, and the gray/white face coloring.
//!
//! A graph qualifies as *simple geometric* when its segments are
//! pairwise disjoint or share at most an endpoint that is a vertex of
//! both: no crossings, no overlaps, no T-junctions, no parallel copies.
//! For such graphs the faces of the induced subdivision are exactly the
//! orbits of the standard "clockwise neighbor of the twin" successor,
//! and when every vertex degree is even the faces are 2-colorable with
//! the unbounded face white.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::geom::{classify_pair, PairClass, Point, Rational};
use crate::graph::SegmentGraph;

/// Error for inputs that are not simple geometric graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotGeometricGraph {
    /// Edge group at this index has multiplicity above one.
    ParallelCopies { edge: usize },
    /// Two edges interact beyond a shared endpoint.
    BadPair { e1: usize, e2: usize, class: PairClass },
    /// A vertex lies in the relative interior of an edge.
    VertexOnEdge { vertex: usize, edge: usize },
}

impl fmt::Display for NotGeometricGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotGeometricGraph::ParallelCopies { edge } => {
                write!(f, "edge {edge} has parallel copies")
            }
            NotGeometricGraph::BadPair { e1, e2, class } => {
                write!(f, "edges {e1} and {e2} interact as {class:?}")
            }
            NotGeometricGraph::VertexOnEdge { vertex, edge } => {
                write!(f, "vertex {vertex} lies inside edge {edge}")
            }
        }
    }
}

impl std::error::Error for NotGeometricGraph {}

/// Exact counterclockwise comparison of direction vectors, starting at
/// the positive x-axis. Vectors must be nonzero; equal directions
/// compare equal.
pub fn cmp_directions(a: &(Rational, Rational), b: &(Rational, Rational)) -> std::cmp::Ordering {
    let half = |d: &(Rational, Rational)| -> u8 {
        if d.1.is_positive() || (d.1.is_zero() && d.0.is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        // Within one half-plane the cross product orders by angle.
        let cross = &a.0 * &b.1 - &a.1 * &b.0;
        if cross.is_positive() {
            std::cmp::Ordering::Less
        } else if cross.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    })
}

/// Half-edge record: `2*e` runs `u -> v` of edge `e`, `2*e + 1` the
/// reverse. The twin of `h` is `h ^ 1`.
#[derive(Debug, Clone)]
pub struct PlanarSubdivision {
    pub directed: bool,
    pub points: Vec<Point>,
    /// Origin vertex of each half-edge.
    pub half_origin: Vec<usize>,
    /// Face-traversal successor of each half-edge.
    pub half_next: Vec<usize>,
    /// Orbits of `half_next`; each is one boundary circuit.
    pub orbits: Vec<Vec<usize>>,
    /// Face id of each orbit; every negative-area orbit maps to the
    /// shared outer face 0.
    pub orbit_face: Vec<usize>,
    /// Total number of faces including the outer face.
    pub face_count: usize,
    /// Face id of each half-edge.
    pub half_face: Vec<usize>,
}

impl PlanarSubdivision {
    pub fn twin(h: usize) -> usize {
        h ^ 1
    }

    pub fn edge_of(h: usize) -> usize {
        h / 2
    }

    pub fn head(&self, h: usize) -> usize {
        self.half_origin[PlanarSubdivision::twin(h)]
    }

    /// Twice the signed area of an orbit.
    pub fn orbit_area2(&self, orbit: &[usize]) -> Rational {
        let mut area2 = Rational::zero();
        for &h in orbit {
            let p = &self.points[self.half_origin[h]];
            let q = &self.points[self.head(h)];
            area2 += &p.x * &q.y - &q.x * &p.y;
        }
        area2
    }
}

/// Builds the planar subdivision of a simple geometric graph.
///
/// Validates the input (see [`NotGeometricGraph`]), links half-edges by
/// exact angular order around every vertex, extracts face orbits, and
/// merges all negative-area orbits into the single outer face 0. The
/// face count always satisfies `V - E + F = 1 + C` with `C` the number
/// of connected components.
pub fn build_subdivision(g: &SegmentGraph) -> Result<PlanarSubdivision, NotGeometricGraph> {
    for (i, e) in g.edges.iter().enumerate() {
        if e.mult != 1 {
            return Err(NotGeometricGraph::ParallelCopies { edge: i });
        }
    }
    for i in 0..g.edges.len() {
        for j in i + 1..g.edges.len() {
            let si = g.segment(&g.edges[i]);
            let sj = g.segment(&g.edges[j]);
            match classify_pair(&si, &sj) {
                PairClass::Disjoint | PairClass::SharedEndpoint => {}
                class => return Err(NotGeometricGraph::BadPair { e1: i, e2: j, class }),
            }
        }
    }
    for (vi, p) in g.vertices.iter().enumerate() {
        for (ei, e) in g.edges.iter().enumerate() {
            if e.u.0 == vi || e.v.0 == vi {
                continue;
            }
            if crate::geom::point_on_segment(p, &g.segment(e)) {
                return Err(NotGeometricGraph::VertexOnEdge { vertex: vi, edge: ei });
            }
        }
    }

    let n_half = 2 * g.edges.len();
    let mut half_origin = vec![0usize; n_half];
    for (i, e) in g.edges.iter().enumerate() {
        half_origin[2 * i] = e.u.0;
        half_origin[2 * i + 1] = e.v.0;
    }
    // Counterclockwise order of outgoing half-edges around each vertex.
    let mut outgoing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (h, &o) in half_origin.iter().enumerate() {
        outgoing.entry(o).or_default().push(h);
    }
    let direction = |h: usize| -> (Rational, Rational) {
        let o = &g.vertices[half_origin[h]];
        let t = &g.vertices[half_origin[PlanarSubdivision::twin(h)]];
        (&t.x - &o.x, &t.y - &o.y)
    };
    for list in outgoing.values_mut() {
        list.sort_by(|&a, &b| cmp_directions(&direction(a), &direction(b)));
    }
    // next(h): clockwise neighbor of twin(h) around the head of h.
    let half_next: Vec<usize> = (0..n_half)
        .map(|h| {
            let t = PlanarSubdivision::twin(h);
            let ring = &outgoing[&half_origin[t]];
            let idx = ring
                .iter()
                .position(|&x| x == t)
                .expect("twin is registered at its origin");
            ring[(idx + ring.len() - 1) % ring.len()]
        })
        .collect();
    // Face orbits.
    let mut orbit_of = vec![usize::MAX; n_half];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..n_half {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let mut orbit = Vec::new();
        let mut h = start;
        loop {
            orbit_of[h] = orbits.len();
            orbit.push(h);
            h = half_next[h];
            if h == start {
                break;
            }
        }
        orbits.push(orbit);
    }
    let sub = PlanarSubdivision {
        directed: g.directed,
        points: g.vertices.clone(),
        half_origin,
        half_next,
        orbits: orbits.clone(),
        orbit_face: Vec::new(),
        face_count: 0,
        half_face: Vec::new(),
    };
    let mut orbit_face = vec![0usize; orbits.len()];
    let mut next_face = 1usize;
    for (i, orbit) in orbits.iter().enumerate() {
        if sub.orbit_area2(orbit).is_positive() {
            orbit_face[i] = next_face;
            next_face += 1;
        }
    }
    let mut half_face = vec![0usize; n_half];
    for (i, orbit) in orbits.iter().enumerate() {
        for &h in orbit {
            half_face[h] = orbit_face[i];
        }
    }
    Ok(PlanarSubdivision {
        orbit_face,
        face_count: next_face,
        half_face,
        ..sub
    })
}

/// Face colors; the outer face is always white.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceColor {
    White,
    Gray,
}

/// Error when the face-adjacency graph is not bipartite, which happens
/// exactly when some vertex has odd degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotBipartite {
    /// An edge both of whose sides would need the same color.
    pub edge: usize,
}

impl fmt::Display for NotBipartite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "faces are not 2-colorable; conflict at edge {}", self.edge)
    }
}

impl std::error::Error for NotBipartite {}

/// Two-colors the faces with the outer face white. Every edge then has
/// one white and one gray side.
pub fn two_color_faces(sub: &PlanarSubdivision) -> Result<Vec<FaceColor>, NotBipartite> {
    let mut colors: Vec<Option<FaceColor>> = vec![None; sub.face_count];
    colors[0] = Some(FaceColor::White);
    // Collect face adjacencies across edges.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sub.face_count];
    for e in 0..sub.half_origin.len() / 2 {
        let f1 = sub.half_face[2 * e];
        let f2 = sub.half_face[2 * e + 1];
        adj[f1].push((f2, e));
        adj[f2].push((f1, e));
    }
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        let c = colors[f].expect("queued faces are colored");
        let flip = match c {
            FaceColor::White => FaceColor::Gray,
            FaceColor::Gray => FaceColor::White,
        };
        for &(f2, e) in &adj[f] {
            match colors[f2] {
                None => {
                    colors[f2] = Some(flip);
                    queue.push_back(f2);
                }
                Some(c2) if c2 == c => return Err(NotBipartite { edge: e }),
                Some(_) => {}
            }
        }
    }
    // Isolated faces cannot occur: every face has boundary edges.
    Ok(colors
        .into_iter()
        .map(|c| c.expect("face adjacency spans all faces"))
        .collect())
}

/// The boundary circuits of the gray faces, each as the half-edge cycle
/// of its orbit (gray faces are bounded, so each has exactly one
/// orbit). Every edge of the graph appears in exactly one circuit.
pub fn gray_circuits(sub: &PlanarSubdivision, colors: &[FaceColor]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for (i, orbit) in sub.orbits.iter().enumerate() {
        if colors[sub.orbit_face[i]] == FaceColor::Gray {
            out.push(orbit.clone());
        }
    }
    // Partition audit: each edge exactly once across all circuits.
    let mut seen = vec![false; sub.half_origin.len() / 2];
    for circuit in &out {
        for &h in circuit {
            let e = PlanarSubdivision::edge_of(h);
            assert!(!seen[e], "edge {e} on two gray circuits");
            seen[e] = true;
        }
    }
    assert!(
        seen.iter().all(|&s| s),
        "some edge borders no gray face"
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Segment;
    use crate::graph::{build_graph, SegmentMultiset};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(x1: i64, y1: i64, x2: i64, y2: i64) -> Segment {
        Segment::new(pt(x1, y1), pt(x2, y2))
    }

    fn graph_of(items: Vec<Segment>) -> SegmentGraph {
        build_graph(&SegmentMultiset::new(
            false,
            items.into_iter().map(|s| (s, 1)).collect(),
        ))
        .unwrap()
    }

    #[test]
    fn angular_order_is_counterclockwise_from_east() {
        use crate::geom::rat_int;
        let dirs = [
            (rat_int(1), rat_int(0)),   // 0 degrees
            (rat_int(2), rat_int(1)),   // shallow first quadrant
            (rat_int(0), rat_int(1)),   // straight up
            (rat_int(-1), rat_int(1)),  // second quadrant
            (rat_int(-1), rat_int(0)),  // west
            (rat_int(-1), rat_int(-1)), // third quadrant
            (rat_int(0), rat_int(-1)),  // straight down
            (rat_int(5), rat_int(-1)),  // fourth quadrant
        ];
        for i in 0..dirs.len() {
            for j in 0..dirs.len() {
                assert_eq!(cmp_directions(&dirs[i], &dirs[j]), i.cmp(&j), "{i} vs {j}");
            }
        }
    }

    #[test]
    fn square_has_two_faces() {
        let g = graph_of(vec![
            seg(0, 0, 1, 0),
            seg(1, 0, 1, 1),
            seg(1, 1, 0, 1),
            seg(0, 1, 0, 0),
        ]);
        let sub = build_subdivision(&g).unwrap();
        assert_eq!(sub.orbits.len(), 2);
        // Euler: V - E + F = 1 + C, with V = E = 4 here.
        assert_eq!(sub.face_count, 2);
        let colors = two_color_faces(&sub).unwrap();
        assert_eq!(colors[0], FaceColor::White);
        assert_eq!(colors[1], FaceColor::Gray);
        let circuits = gray_circuits(&sub, &colors);
        assert_eq!(circuits.len(), 1);
        assert_eq!(circuits[0].len(), 4);
    }

    #[test]
    fn figure_eight_has_two_gray_triangles() {
        // Two triangles sharing the origin.
        let g = graph_of(vec![
            seg(0, 0, 2, 1),
            seg(2, 1, 2, -1),
            seg(2, -1, 0, 0),
            seg(0, 0, -2, 1),
            seg(-2, 1, -2, -1),
            seg(-2, -1, 0, 0),
        ]);
        let sub = build_subdivision(&g).unwrap();
        assert_eq!(g.vertices.len() as i64 - g.edge_count() as i64 + sub.face_count as i64, 2);
        let colors = two_color_faces(&sub).unwrap();
        let circuits = gray_circuits(&sub, &colors);
        assert_eq!(circuits.len(), 2);
        assert!(circuits.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn nested_squares_with_corridor() {
        // A square inside a square, joined by a two-path corridor so
        // every degree stays even. The region between the squares minus
        // the corridor lens is a single gray face whose boundary circuit
        // walks all twelve edges.
        let g = graph_of(vec![
            seg(0, 0, 10, 0),
            seg(10, 0, 10, 10),
            seg(10, 10, 0, 10),
            seg(0, 10, 0, 0),
            seg(3, 3, 7, 3),
            seg(7, 3, 7, 7),
            seg(7, 7, 3, 7),
            seg(3, 7, 3, 3),
            seg(0, 0, 1, 2),
            seg(1, 2, 3, 3),
            seg(0, 0, 2, 1),
            seg(2, 1, 3, 3),
        ]);
        let sub = build_subdivision(&g).unwrap();
        // Connected: V - E + F = 2.
        assert_eq!(10 - 12 + sub.face_count as i64, 2);
        let colors = two_color_faces(&sub).unwrap();
        // Outer white, ring gray, corridor lens white, inner interior white.
        assert_eq!(colors.iter().filter(|c| **c == FaceColor::Gray).count(), 1);
        let circuits = gray_circuits(&sub, &colors);
        assert_eq!(circuits.len(), 1);
        assert_eq!(circuits[0].len(), 12);
    }

    #[test]
    fn disconnected_components_color_independently() {
        // Side-by-side squares: both interiors gray relative to the
        // shared outer face (coloring is per component).
        let g = graph_of(vec![
            seg(0, 0, 1, 0),
            seg(1, 0, 1, 1),
            seg(1, 1, 0, 1),
            seg(0, 1, 0, 0),
            seg(5, 0, 6, 0),
            seg(6, 0, 6, 1),
            seg(6, 1, 5, 1),
            seg(5, 1, 5, 0),
        ]);
        let sub = build_subdivision(&g).unwrap();
        // Euler with V = E = 8 and two squares: three faces.
        assert_eq!(sub.face_count, 3);
        let colors = two_color_faces(&sub).unwrap();
        assert_eq!(colors.iter().filter(|c| **c == FaceColor::Gray).count(), 2);
    }

    #[test]
    fn rejects_non_geometric_inputs() {
        // T-junction: the touching pair itself is flagged.
        let g = graph_of(vec![seg(0, 0, 2, 0), seg(1, 0, 1, 1)]);
        assert!(matches!(
            build_subdivision(&g),
            Err(NotGeometricGraph::BadPair { class: PairClass::EndpointOnInterior, .. })
        ));
        // Overlap.
        let g = graph_of(vec![seg(0, 0, 2, 0), seg(1, 0, 3, 0)]);
        assert!(matches!(
            build_subdivision(&g),
            Err(NotGeometricGraph::BadPair { class: PairClass::Overlap, .. })
        ));
        // Crossing.
        let g = graph_of(vec![seg(0, 0, 2, 2), seg(0, 2, 2, 0)]);
        assert!(matches!(
            build_subdivision(&g),
            Err(NotGeometricGraph::BadPair { class: PairClass::Crossing, .. })
        ));
        // Parallel copies.
        let g = build_graph(&SegmentMultiset::new(false, vec![(seg(0, 0, 1, 0), 2)])).unwrap();
        assert!(matches!(
            build_subdivision(&g),
            Err(NotGeometricGraph::ParallelCopies { edge: 0 })
        ));
    }

    #[test]
    fn odd_degrees_break_two_coloring() {
        // Square plus one diagonal: two degree-3 vertices.
        let g = graph_of(vec![
            seg(0, 0, 1, 0),
            seg(1, 0, 1, 1),
            seg(1, 1, 0, 1),
            seg(0, 1, 0, 0),
            seg(0, 0, 1, 1),
        ]);
        let sub = build_subdivision(&g).unwrap();
        assert_eq!(sub.face_count, 3);
        assert!(two_color_faces(&sub).is_err());
    }

}
