//! Bars: maximal groups of pairwise-connected overlapping collinear
//! edges.
//!
//! Two edges belong to the same bar when one can walk from one to the
//! other through segments that pairwise overlap in a positive-length
//! portion. Each bar has a support segment (the union interval on its
//! carrier line); subdivision and insertion both operate bar by bar.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::geom::{classify_pair, point_on_segment, PairClass, Point, Rational, Segment};
use crate::graph::{SegmentGraph, VertexId};

/// One bar of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bar {
    /// Union of the member segments, as a segment on the carrier line.
    pub support: Segment,
    /// Indices into `SegmentGraph::edges` of the member edge groups.
    pub member_edges: Vec<usize>,
    /// Every graph vertex lying on the support (endpoints included),
    /// sorted along the carrier line.
    pub on_vertices: Vec<VertexId>,
}

/// Error raised by [`b_parity`] when the queried vertex is off the bar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexNotOnBar {
    pub vertex: VertexId,
}

impl fmt::Display for VertexNotOnBar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex {} does not lie on the bar", self.vertex)
    }
}

impl std::error::Error for VertexNotOnBar {}

/// Canonical exact key for the line `Ax + By = C` through a segment,
/// normalized so that equal lines compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct LineKey {
    vertical: bool,
    slope_or_x: Rational,
    intercept: Rational,
}

fn line_key(seg: &Segment) -> LineKey {
    let dx = &seg.b.x - &seg.a.x;
    let dy = &seg.b.y - &seg.a.y;
    if dx.is_zero() {
        LineKey {
            vertical: true,
            slope_or_x: seg.a.x.clone(),
            intercept: Rational::zero(),
        }
    } else {
        let slope = dy / &dx;
        let intercept = &seg.a.y - &slope * &seg.a.x;
        LineKey {
            vertical: false,
            slope_or_x: slope,
            intercept,
        }
    }
}

/// Monotone parameter of a point along the carrier line of `key`.
fn line_param(key: &LineKey, p: &Point) -> Rational {
    if key.vertical {
        p.y.clone()
    } else {
        p.x.clone()
    }
}

/// Computes the bar decomposition of a noncrossing graph.
///
/// Edges are grouped by carrier line and then merged transitively along
/// each line wherever consecutive intervals share a positive-length
/// portion; touching only at a point does not merge.
pub fn bar_decomposition(g: &SegmentGraph) -> Vec<Bar> {
    let mut by_line: BTreeMap<LineKey, Vec<usize>> = BTreeMap::new();
    for (i, e) in g.edges.iter().enumerate() {
        by_line.entry(line_key(&g.segment(e))).or_default().push(i);
    }
    let mut bars = Vec::new();
    for (key, edge_ids) in by_line {
        // Sort member edges by their interval on the line.
        let mut intervals: Vec<(Rational, Rational, usize)> = edge_ids
            .iter()
            .map(|&i| {
                let seg = g.segment(&g.edges[i]);
                let ta = line_param(&key, &seg.a);
                let tb = line_param(&key, &seg.b);
                if ta <= tb {
                    (ta, tb, i)
                } else {
                    (tb, ta, i)
                }
            })
            .collect();
        intervals.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut current: Option<(Rational, Rational, Vec<usize>)> = None;
        let mut groups: Vec<(Rational, Rational, Vec<usize>)> = Vec::new();
        for (lo, hi, id) in intervals {
            match current.take() {
                Some((clo, chi, mut members)) if lo < chi => {
                    members.push(id);
                    let chi = chi.max(hi);
                    current = Some((clo, chi, members));
                }
                Some(done) => {
                    groups.push(done);
                    current = Some((lo, hi, vec![id]));
                }
                None => current = Some((lo, hi, vec![id])),
            }
        }
        if let Some(done) = current {
            groups.push(done);
        }
        for (_, _, members) in groups {
            let endpoints: Vec<&Point> = members
                .iter()
                .flat_map(|&i| [g.point(g.edges[i].u), g.point(g.edges[i].v)])
                .collect();
            let lo = endpoints
                .iter()
                .min_by(|p, q| line_param(&key, p).cmp(&line_param(&key, q)))
                .expect("bar has at least one member edge");
            let hi = endpoints
                .iter()
                .max_by(|p, q| line_param(&key, p).cmp(&line_param(&key, q)))
                .expect("bar has at least one member edge");
            let support = Segment::new((*lo).clone(), (*hi).clone());
            let mut on_vertices: Vec<VertexId> = (0..g.vertices.len())
                .map(VertexId)
                .filter(|&v| point_on_segment(g.point(v), &support))
                .collect();
            on_vertices
                .sort_by_key(|&a| line_param(&key, g.point(a)));
            bars.push(Bar {
                support,
                member_edges: members,
                on_vertices,
            });
        }
    }
    bars
}

/// Parity of the number of bar edges (with multiplicity) incident to a
/// vertex of the bar. Odd vertices are exactly the ones the subdivision
/// construction has to repair.
pub fn b_parity(g: &SegmentGraph, bar: &Bar, v: VertexId) -> Result<bool, VertexNotOnBar> {
    if !point_on_segment(g.point(v), &bar.support) {
        return Err(VertexNotOnBar { vertex: v });
    }
    let mut count: usize = 0;
    for &i in &bar.member_edges {
        let e = &g.edges[i];
        if e.u == v || e.v == v {
            count += e.mult as usize * if e.u == e.v { 2 } else { 1 };
        }
    }
    Ok(count % 2 == 1)
}

/// Reference decomposition via union-find over pairwise overlap tests,
/// used to cross-check [`bar_decomposition`]. Returns the member-edge
/// sets only, each sorted, the whole list sorted by first member.
pub fn bar_members_naive(g: &SegmentGraph) -> Vec<Vec<usize>> {
    let n = g.edges.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let si = g.segment(&g.edges[i]);
            let sj = g.segment(&g.edges[j]);
            if classify_pair(&si, &sj) == PairClass::Overlap {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, j);
                parent[ri] = rj;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, SegmentMultiset};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn seg(x1: i64, y1: i64, x2: i64, y2: i64) -> Segment {
        Segment::new(pt(x1, y1), pt(x2, y2))
    }

    #[test]
    fn bars_merge_overlaps_but_not_touches() {
        // [0,2] and [1,3] overlap; [3,4] only touches [1,3]; the slanted
        // edge is its own bar.
        let ms = SegmentMultiset::new(
            false,
            vec![
                (seg(0, 0, 2, 0), 1),
                (seg(1, 0, 3, 0), 1),
                (seg(3, 0, 4, 0), 1),
                (seg(0, 0, 1, 1), 1),
            ],
        );
        let g = build_graph(&ms).unwrap();
        let bars = bar_decomposition(&g);
        assert_eq!(bars.len(), 3);
        let big = bars
            .iter()
            .find(|b| b.member_edges.len() == 2)
            .expect("one bar with two members");
        assert_eq!(big.support, seg(0, 0, 3, 0));
        // All four vertices on the x-axis within [0,3] lie on the bar.
        let on_pts: Vec<&Point> = big.on_vertices.iter().map(|&v| g.point(v)).collect();
        assert_eq!(on_pts, vec![&pt(0, 0), &pt(1, 0), &pt(2, 0), &pt(3, 0)]);
    }

    #[test]
    fn bars_match_naive_union_find() {
        let ms = SegmentMultiset::new(
            false,
            vec![
                (seg(0, 0, 2, 0), 1),
                (seg(1, 0, 4, 0), 1),
                (seg(4, 0, 6, 0), 1),
                (seg(5, 0, 7, 0), 1),
                (seg(0, 1, 7, 1), 1),
                (seg(0, 0, 0, 5), 1),
                (seg(0, 2, 0, 3), 1),
                (seg(1, 1, 3, 3), 1),
                (seg(2, 2, 5, 5), 2),
            ],
        );
        let g = build_graph(&ms).unwrap();
        let mut fast: Vec<Vec<usize>> = bar_decomposition(&g)
            .into_iter()
            .map(|b| {
                let mut m = b.member_edges;
                m.sort();
                m
            })
            .collect();
        fast.sort();
        assert_eq!(fast, bar_members_naive(&g));
    }

    #[test]
    fn vertical_bars_use_y_order() {
        let ms = SegmentMultiset::new(false, vec![(seg(2, 5, 2, 0), 1), (seg(2, 3, 2, 7), 1)]);
        let g = build_graph(&ms).unwrap();
        let bars = bar_decomposition(&g);
        assert_eq!(bars.len(), 1);
        assert_eq!(bars[0].support, seg(2, 0, 2, 7));
        let on_pts: Vec<&Point> = bars[0].on_vertices.iter().map(|&v| g.point(v)).collect();
        assert_eq!(on_pts, vec![&pt(2, 0), &pt(2, 3), &pt(2, 5), &pt(2, 7)]);
    }

    #[test]
    fn parity_counts_bar_incidences_only() {
        // Bar of [0,2] and [1,3]; vertex 1 has one bar edge endpoint at
        // (1,0) plus an off-bar edge that must not count.
        let ms = SegmentMultiset::new(
            false,
            vec![
                (seg(0, 0, 2, 0), 1),
                (seg(1, 0, 3, 0), 1),
                (seg(1, 0, 1, 4), 1),
            ],
        );
        let g = build_graph(&ms).unwrap();
        let bars = bar_decomposition(&g);
        let bar = bars
            .iter()
            .find(|b| b.member_edges.len() == 2)
            .expect("axis bar");
        let vid = |x: i64, y: i64| {
            VertexId(
                g.vertices
                    .iter()
                    .position(|p| p == &pt(x, y))
                    .expect("vertex exists"),
            )
        };
        assert_eq!(b_parity(&g, bar, vid(1, 0)), Ok(true));
        assert_eq!(b_parity(&g, bar, vid(0, 0)), Ok(true));
        assert_eq!(b_parity(&g, bar, vid(2, 0)), Ok(true));
        assert!(b_parity(&g, bar, vid(1, 4)).is_err());
        // A doubled edge flips parity back to even.
        let ms = SegmentMultiset::new(false, vec![(seg(0, 0, 2, 0), 2)]);
        let g = build_graph(&ms).unwrap();
        let bars = bar_decomposition(&g);
        assert_eq!(b_parity(&g, &bars[0], VertexId(0)), Ok(false));
    }
}
