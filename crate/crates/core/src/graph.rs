//! Segment multisets and the vertex/edge graphs they induce.
//!
//! The input to every decision procedure in this crate is a finite
//! multiset of closed line segments, optionally directed. This module
//! turns such a multiset into an explicit multigraph (deduplicating
//! coincident endpoints and merging parallel copies into multiplicities),
//! and provides the two necessary screenings every instance goes
//! through: the crossing check and the Euler condition.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::geom::{
    classify_pair, eps_below, point_on_segment, squared_distance, point_segment_distance2,
    PairClass, Point, Rational, Segment,
};

/// Index of a vertex in a [`SegmentGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A multiset of segments, the raw instance representation.
///
/// `items` preserves input order; multiplicities below one and
/// degenerate (zero-length) segments are rejected by [`build_graph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMultiset {
    pub directed: bool,
    pub items: Vec<(Segment, u32)>,
}

impl SegmentMultiset {
    pub fn new(directed: bool, items: Vec<(Segment, u32)>) -> Self {
        SegmentMultiset { directed, items }
    }

    /// Items expanded copy-by-copy, pairing each with its item index.
    pub fn expanded(&self) -> impl Iterator<Item = (usize, &Segment)> + '_ {
        self.items
            .iter()
            .enumerate()
            .flat_map(|(i, (seg, mult))| std::iter::repeat_n((i, seg), *mult as usize))
    }

    /// Total number of segment copies.
    pub fn size(&self) -> usize {
        self.items.iter().map(|(_, m)| *m as usize).sum()
    }

    /// Sum of Euclidean lengths is irrational in general; its square is
    /// not additive, so instead we expose the exact sum of lengths for
    /// rectilinear-style inputs where every length is rational, and
    /// `None` otherwise.
    pub fn total_length(&self) -> Option<Rational> {
        let mut sum = Rational::zero();
        for (seg, mult) in &self.items {
            let len2 = squared_distance(&seg.a, &seg.b);
            let len = crate::geom::rational_sqrt(&len2)?;
            sum += len * Rational::from_integer(num_bigint::BigInt::from(*mult));
        }
        Some(sum)
    }
}

/// Errors raised while forming a graph from a multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Item at this index has coincident endpoints.
    ZeroLengthSegment(usize),
    /// Item at this index has multiplicity zero.
    ZeroMultiplicity(usize),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::ZeroLengthSegment(i) => {
                write!(f, "segment at index {i} has zero length")
            }
            GraphError::ZeroMultiplicity(i) => {
                write!(f, "segment at index {i} has multiplicity zero")
            }
        }
    }
}

impl std::error::Error for GraphError {}

/// A group of parallel segment copies between two vertices.
///
/// For directed graphs the orientation is `u -> v`; for undirected
/// graphs `u <= v` holds (vertex ids follow the lexicographic order of
/// their points).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub mult: u32,
}

/// A geometric multigraph: deduplicated vertices plus merged edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentGraph {
    pub directed: bool,
    pub vertices: Vec<Point>,
    pub edges: Vec<MultiEdge>,
}

/// Builds the graph induced by a multiset: endpoints become vertices
/// (exact-coordinate deduplication) and copies of the same segment are
/// merged into one [`MultiEdge`] with summed multiplicity.
pub fn build_graph(input: &SegmentMultiset) -> Result<SegmentGraph, GraphError> {
    for (i, (seg, mult)) in input.items.iter().enumerate() {
        if seg.is_degenerate() {
            return Err(GraphError::ZeroLengthSegment(i));
        }
        if *mult == 0 {
            return Err(GraphError::ZeroMultiplicity(i));
        }
    }
    let mut point_ids: BTreeMap<Point, usize> = BTreeMap::new();
    for (seg, _) in &input.items {
        point_ids.insert(seg.a.clone(), 0);
        point_ids.insert(seg.b.clone(), 0);
    }
    let vertices: Vec<Point> = point_ids.keys().cloned().collect();
    for (i, p) in vertices.iter().enumerate() {
        *point_ids.get_mut(p).expect("point was inserted above") = i;
    }
    let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (seg, mult) in &input.items {
        let a = point_ids[&seg.a];
        let b = point_ids[&seg.b];
        let key = if input.directed || a <= b { (a, b) } else { (b, a) };
        *merged.entry(key).or_insert(0) += *mult;
    }
    let edges = merged
        .into_iter()
        .map(|((u, v), mult)| MultiEdge {
            u: VertexId(u),
            v: VertexId(v),
            mult,
        })
        .collect();
    Ok(SegmentGraph {
        directed: input.directed,
        vertices,
        edges,
    })
}

impl SegmentGraph {
    pub fn point(&self, v: VertexId) -> &Point {
        &self.vertices[v.0]
    }

    /// The geometric segment of an edge group (oriented `u -> v`).
    pub fn segment(&self, e: &MultiEdge) -> Segment {
        Segment::new(self.point(e.u).clone(), self.point(e.v).clone())
    }

    /// Total number of edge copies.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.mult as usize).sum()
    }

    /// Undirected degree (each copy contributes one to both endpoints).
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|e| e.u == v || e.v == v)
            .map(|e| e.mult as usize * if e.u == e.v { 2 } else { 1 })
            .sum()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|e| e.u == v)
            .map(|e| e.mult as usize)
            .sum()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|e| e.v == v)
            .map(|e| e.mult as usize)
            .sum()
    }

    /// Expands edge groups into individual copies `(u, v)`.
    pub fn edge_instances(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for e in &self.edges {
            for _ in 0..e.mult {
                out.push((e.u, e.v));
            }
        }
        out
    }

    /// True when every vertex is reachable from every other one along
    /// edges (ignoring direction).
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u.0].push(e.v.0);
            adj[e.v.0].push(e.u.0);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// True when the whole vertex set forms one strongly connected
    /// component under the directed edges.
    pub fn is_strongly_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let n = self.vertices.len();
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for e in &self.edges {
            fwd[e.u.0].push(e.v.0);
            bwd[e.v.0].push(e.u.0);
        }
        let reach = |adj: &Vec<Vec<usize>>| -> bool {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(&fwd) && reach(&bwd)
    }
}

/// A closed walk given by its vertex sequence; consecutive entries
/// (cyclically) are the traversed edges. A valid Euler tour visits every
/// edge copy exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub vertices: Vec<VertexId>,
}

impl Tour {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Tour { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The edge traversed at position `i`, as an ordered vertex pair.
    pub fn step(&self, i: usize) -> (VertexId, VertexId) {
        let m = self.vertices.len();
        (self.vertices[i % m], self.vertices[(i + 1) % m])
    }
}

/// Reasons a vertex sequence fails to be an Euler tour of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TourError {
    WrongLength { expected: usize, got: usize },
    /// The pair at this position is not an edge of the graph (respecting
    /// direction for directed graphs).
    NotAnEdge { position: usize },
    /// Some edge group is traversed more or fewer times than its
    /// multiplicity.
    CoverageMismatch,
}

impl fmt::Display for TourError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TourError::WrongLength { expected, got } => {
                write!(f, "tour has {got} steps but the graph has {expected} edges")
            }
            TourError::NotAnEdge { position } => {
                write!(f, "step {position} of the tour is not an edge of the graph")
            }
            TourError::CoverageMismatch => {
                write!(f, "tour does not traverse each edge exactly its multiplicity")
            }
        }
    }
}

impl std::error::Error for TourError {}

/// Checks that `tour` is an Euler tour of `g`: correct length, every
/// step an edge (with direction respected when applicable), and the
/// traversed multiset equal to the edge multiset.
pub fn validate_tour(g: &SegmentGraph, tour: &Tour) -> Result<(), TourError> {
    let m = g.edge_count();
    if tour.len() != m {
        return Err(TourError::WrongLength {
            expected: m,
            got: tour.len(),
        });
    }
    let mut keys: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for e in &g.edges {
        keys.insert((e.u.0, e.v.0), e.mult);
    }
    let mut used: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for i in 0..m {
        let (a, b) = tour.step(i);
        let key = if g.directed || a.0 <= b.0 {
            (a.0, b.0)
        } else {
            (b.0, a.0)
        };
        if !keys.contains_key(&key) {
            return Err(TourError::NotAnEdge { position: i });
        }
        *used.entry(key).or_insert(0) += 1;
    }
    if used == keys {
        Ok(())
    } else {
        Err(TourError::CoverageMismatch)
    }
}

/// The Euler condition: for undirected inputs, connectivity plus even
/// degrees; for directed inputs, balanced in/out degrees plus strong
/// connectivity of the whole vertex set.
pub fn check_eulerian(g: &SegmentGraph) -> bool {
    if g.directed {
        (0..g.vertices.len()).all(|v| g.in_degree(VertexId(v)) == g.out_degree(VertexId(v)))
            && g.is_strongly_connected()
    } else {
        (0..g.vertices.len()).all(|v| g.degree(VertexId(v)).is_multiple_of(2)) && g.is_connected()
    }
}

/// Report listing every pair of multiset items whose segments properly
/// cross (interiors intersecting at a single point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingReport {
    pub pairs: Vec<(usize, usize)>,
}

impl fmt::Display for CrossingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} crossing pair(s):", self.pairs.len())?;
        for (i, j) in &self.pairs {
            write!(f, " ({i},{j})")?;
        }
        Ok(())
    }
}

impl std::error::Error for CrossingReport {}

/// Checks that no two segments of the multiset properly cross.
///
/// Shared endpoints, T-junctions, and overlaps are all allowed here;
/// only transversal interior crossings disqualify an instance. The scan
/// is a sweep over x-sorted intervals so that far-apart pairs are never
/// compared; [`noncrossing_pairs_naive`] is the unoptimized reference.
pub fn check_noncrossing(ms: &SegmentMultiset) -> Result<(), CrossingReport> {
    let n = ms.items.len();
    let spans: Vec<(&Rational, &Rational)> = ms
        .items
        .iter()
        .map(|(s, _)| {
            if s.a.x <= s.b.x {
                (&s.a.x, &s.b.x)
            } else {
                (&s.b.x, &s.a.x)
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| spans[i].0.cmp(spans[j].0).then(spans[i].1.cmp(spans[j].1)));
    let mut active: Vec<usize> = Vec::new();
    let mut pairs = Vec::new();
    for &i in &order {
        active.retain(|&j| spans[j].1 >= spans[i].0);
        for &j in &active {
            if classify_pair(&ms.items[i].0, &ms.items[j].0) == PairClass::Crossing {
                pairs.push((j.min(i), j.max(i)));
            }
        }
        active.push(i);
    }
    if pairs.is_empty() {
        Ok(())
    } else {
        pairs.sort();
        pairs.dedup();
        Err(CrossingReport { pairs })
    }
}

/// Reference implementation of the crossing scan: every pair, no
/// pruning. Kept public so tests can cross-validate the optimized scan
/// against an independent code path.
pub fn noncrossing_pairs_naive(ms: &SegmentMultiset) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..ms.items.len() {
        for j in i + 1..ms.items.len() {
            if classify_pair(&ms.items[i].0, &ms.items[j].0) == PairClass::Crossing {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Certificate-scale selection for a graph.
///
/// The governing squared distance is the minimum over (a) all distinct
/// vertex pairs and (b) the distance from each vertex to each edge whose
/// segment does not geometrically contain it. T-junction contacts are
/// excluded by (b), so the result is positive for every graph with at
/// least two vertices, and `None` only for degenerate single-point
/// inputs.
pub fn choose_epsilon(g: &SegmentGraph) -> Option<Rational> {
    let mut d2_min: Option<Rational> = None;
    let mut consider = |d2: Rational| {
        if d2.is_zero() {
            return;
        }
        if d2_min.as_ref().is_none_or(|m| d2 < *m) {
            d2_min = Some(d2);
        }
    };
    for (i, p) in g.vertices.iter().enumerate() {
        for q in &g.vertices[i + 1..] {
            consider(squared_distance(p, q));
        }
    }
    for e in &g.edges {
        let seg = g.segment(e);
        for p in &g.vertices {
            if point_on_segment(p, &seg) {
                continue;
            }
            consider(point_segment_distance2(p, &seg));
        }
    }
    Some(eps_below(&d2_min?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_int};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(x1: i64, y1: i64, x2: i64, y2: i64) -> Segment {
        Segment::new(pt(x1, y1), pt(x2, y2))
    }

    fn undirected(items: Vec<(Segment, u32)>) -> SegmentMultiset {
        SegmentMultiset::new(false, items)
    }

    #[test]
    fn build_merges_coincident_endpoints_and_copies() {
        let ms = undirected(vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 0, 0), 1)]);
        let g = build_graph(&ms).unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].mult, 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(VertexId(0)), 2);
    }

    #[test]
    fn build_preserves_direction() {
        let ms = SegmentMultiset::new(true, vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 0, 0), 1)]);
        let g = build_graph(&ms).unwrap();
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.in_degree(VertexId(0)), 1);
        assert_eq!(g.out_degree(VertexId(0)), 1);
    }

    #[test]
    fn build_rejects_degenerate_items() {
        let bad = undirected(vec![(seg(0, 0, 0, 0), 1)]);
        assert_eq!(build_graph(&bad), Err(GraphError::ZeroLengthSegment(0)));
        let bad = undirected(vec![(seg(0, 0, 1, 0), 0)]);
        assert_eq!(build_graph(&bad), Err(GraphError::ZeroMultiplicity(0)));
    }

    fn square() -> SegmentMultiset {
        undirected(vec![
            (seg(0, 0, 1, 0), 1),
            (seg(1, 0, 1, 1), 1),
            (seg(1, 1, 0, 1), 1),
            (seg(0, 1, 0, 0), 1),
        ])
    }

    #[test]
    fn euler_condition_undirected() {
        let g = build_graph(&square()).unwrap();
        assert!(check_eulerian(&g));
        // A bare path has two odd vertices.
        let path = undirected(vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 2, 0), 1)]);
        assert!(!check_eulerian(&build_graph(&path).unwrap()));
        // Two disjoint doubled edges are even but disconnected.
        let split = undirected(vec![(seg(0, 0, 1, 0), 2), (seg(5, 0, 6, 0), 2)]);
        assert!(!check_eulerian(&build_graph(&split).unwrap()));
    }

    #[test]
    fn euler_condition_directed() {
        let cycle = SegmentMultiset::new(
            true,
            vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 0, 1), 1), (seg(0, 1, 0, 0), 1)],
        );
        assert!(check_eulerian(&build_graph(&cycle).unwrap()));
        // Reversing one edge breaks both balance and strong connectivity.
        let broken = SegmentMultiset::new(
            true,
            vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 0, 1), 1), (seg(0, 0, 0, 1), 1)],
        );
        assert!(!check_eulerian(&build_graph(&broken).unwrap()));
        // Two opposite copies of one segment are balanced and strongly
        // connected.
        let pair = SegmentMultiset::new(true, vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 0, 0), 1)]);
        assert!(check_eulerian(&build_graph(&pair).unwrap()));
    }

    #[test]
    fn crossing_scan_flags_only_proper_crossings() {
        // An X configuration crosses.
        let x = undirected(vec![(seg(0, 0, 2, 2), 1), (seg(0, 2, 2, 0), 1)]);
        let report = check_noncrossing(&x).unwrap_err();
        assert_eq!(report.pairs, vec![(0, 1)]);
        // Shared endpoints, T-junctions, and overlaps pass.
        let ok = undirected(vec![
            (seg(0, 0, 2, 0), 1),
            (seg(1, 0, 1, 1), 1), // T-junction onto the first segment
            (seg(0, 0, 1, 0), 1), // overlaps the first segment
            (seg(2, 0, 3, 1), 1), // shared endpoint
        ]);
        assert!(check_noncrossing(&ok).is_ok());
        assert!(noncrossing_pairs_naive(&ok).is_empty());
    }

    #[test]
    fn crossing_scan_matches_naive_on_random_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for _ in 0..60 {
            let n = rng.gen_range(2..14);
            let mut items = Vec::new();
            for _ in 0..n {
                let (x1, y1, x2, y2) = (
                    rng.gen_range(-6i64..7),
                    rng.gen_range(-6i64..7),
                    rng.gen_range(-6i64..7),
                    rng.gen_range(-6i64..7),
                );
                if (x1, y1) == (x2, y2) {
                    continue;
                }
                items.push((seg(x1, y1, x2, y2), 1));
            }
            if items.is_empty() {
                continue;
            }
            let ms = undirected(items);
            let naive = noncrossing_pairs_naive(&ms);
            match check_noncrossing(&ms) {
                Ok(()) => assert!(naive.is_empty()),
                Err(report) => assert_eq!(report.pairs, naive),
            }
        }
    }

    #[test]
    fn tour_validation() {
        let g = build_graph(&square()).unwrap();
        // Vertices sorted lexicographically: (0,0) (0,1) (1,0) (1,1).
        let ok = Tour::new(vec![VertexId(0), VertexId(2), VertexId(3), VertexId(1)]);
        assert_eq!(validate_tour(&g, &ok), Ok(()));
        let short = Tour::new(vec![VertexId(0), VertexId(2), VertexId(3)]);
        assert!(matches!(
            validate_tour(&g, &short),
            Err(TourError::WrongLength { expected: 4, got: 3 })
        ));
        let diagonal = Tour::new(vec![VertexId(0), VertexId(2), VertexId(3), VertexId(0)]);
        assert!(matches!(
            validate_tour(&g, &diagonal),
            Err(TourError::NotAnEdge { position: 2 })
        ));
        // Repeating one edge and skipping another keeps every step legal
        // but breaks coverage.
        let doubled = SegmentMultiset::new(false, vec![(seg(0, 0, 1, 0), 2), (seg(1, 0, 2, 0), 2)]);
        let g2 = build_graph(&doubled).unwrap();
        let bad = Tour::new(vec![VertexId(0), VertexId(1), VertexId(0), VertexId(1)]);
        assert_eq!(validate_tour(&g2, &bad), Err(TourError::CoverageMismatch));
        let ok2 = Tour::new(vec![VertexId(0), VertexId(1), VertexId(2), VertexId(1)]);
        assert_eq!(validate_tour(&g2, &ok2), Ok(()));
        // Directed tours must respect orientation.
        let dir = SegmentMultiset::new(
            true,
            vec![(seg(0, 0, 1, 0), 1), (seg(1, 0, 0, 1), 1), (seg(0, 1, 0, 0), 1)],
        );
        let g3 = build_graph(&dir).unwrap();
        let fwd = Tour::new(vec![VertexId(0), VertexId(2), VertexId(1)]);
        assert_eq!(validate_tour(&g3, &fwd), Ok(()));
        let rev = Tour::new(vec![VertexId(1), VertexId(2), VertexId(0)]);
        assert!(validate_tour(&g3, &rev).is_err());
    }

    #[test]
    fn epsilon_accounts_for_vertex_edge_distances() {
        let g = build_graph(&square()).unwrap();
        // Minimum feature distance in the unit square is 1.
        assert_eq!(choose_epsilon(&g), Some(rat(1, 16)));
        // A vertex hovering 1/4 above a long edge drives the bound below
        // what vertex-vertex distances alone would give.
        let hover = undirected(vec![
            (seg(0, 0, 2, 0), 1),
            (
                Segment::new(Point::new(rat_int(1), rat(1, 4)), pt(3, 2)),
                1,
            ),
        ]);
        let g = build_graph(&hover).unwrap();
        assert_eq!(choose_epsilon(&g), Some(rat(1, 64)));
    }

    #[test]
    fn epsilon_ignores_containment_contacts() {
        // T-junction: the midpoint vertex lies on the long edge, which
        // must not force epsilon to zero.
        let t = undirected(vec![(seg(0, 0, 2, 0), 1), (seg(1, 0, 1, 1), 1)]);
        let g = build_graph(&t).unwrap();
        let eps = choose_epsilon(&g).unwrap();
        assert!(eps > Rational::zero());
        assert_eq!(eps, rat(1, 16));
    }
}
